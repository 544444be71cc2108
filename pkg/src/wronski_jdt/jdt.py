"""Jeu de taquin driven by moving real values.

Sliding follows each labelled value along a path in RP^1. Whenever two
norms cross, the pair either trades boxes (ordinals kept) or stays put
(ordinals swap). Switching, rectification, the two equivalence
relations, promotion and the ``s_{k,L}`` involutions are built on top.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from .partitions import Box, Partition, SkewShape, box_distance, syt_count
from .tableaux import (
    INF,
    ValuedTableau,
    is_inf,
    norm_cmp,
    norm_key,
    ordinal_syt,
    ordinalize,
    relabel,
    satisfies_restrictions,
)


class NonGenericPath(ValueError):
    pass


@dataclass(frozen=True)
class SlideEvent:
    t: Any
    label_a: int
    label_b: int
    adjacent: bool
    swapped: bool

    def csv_row(self) -> list:
        return [float(self.t), self.label_a, self.label_b, int(self.adjacent), int(self.swapped)]


def _inv(v):
    if is_inf(v):
        return Fraction(0)
    if v == 0:
        return INF
    return 1 / v if isinstance(v, float) else Fraction(1) / v


@dataclass(frozen=True)
class ValuePath:
    """Piecewise motion of labelled values.

    ``knots[i][s]`` is the value of label ``i`` at ``times[s]``. On each
    segment a label moves linearly in ``v``, or linearly in ``1/v`` when
    ``through_inf[i][s]`` is set or an endpoint is ``INF``; the latter is
    how a value passes through infinity.
    """

    times: tuple
    knots: tuple
    through_inf: tuple = field(default=())

    def __post_init__(self) -> None:
        times = tuple(self.times)
        knots = tuple(tuple(k) for k in self.knots)
        if len(times) < 2 or any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("knot times must be strictly increasing")
        if any(len(k) != len(times) for k in knots):
            raise ValueError("every label needs one value per knot time")
        flags = self.through_inf
        if not flags:
            flags = tuple((False,) * (len(times) - 1) for _ in knots)
        flags = tuple(tuple(bool(x) for x in f) for f in flags)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "through_inf", flags)

    @classmethod
    def linear(cls, start: Sequence, end: Sequence) -> "ValuePath":
        return cls((Fraction(0), Fraction(1)), tuple(zip(start, end)))

    @classmethod
    def constant(cls, values: Sequence) -> "ValuePath":
        return cls.linear(values, values)

    @classmethod
    def moves(cls, start: Sequence, steps: Sequence[tuple[int, Any]]) -> "ValuePath":
        """Move one label per segment: ``steps`` is a list of ``(label, target)``."""
        m = len(steps)
        times = tuple(Fraction(s, m) for s in range(m + 1)) if m else (Fraction(0), Fraction(1))
        cur = list(start)
        cols = [list(cur)]
        for label, target in steps:
            cur[label] = target
            cols.append(list(cur))
        if not steps:
            cols.append(list(cur))
        knots = tuple(tuple(col[i] for col in cols) for i in range(len(start)))
        return cls(times, knots)

    @property
    def n_labels(self) -> int:
        return len(self.knots)

    def start(self) -> list:
        return [k[0] for k in self.knots]

    def end(self) -> list:
        return [k[-1] for k in self.knots]

    def _segment(self, t) -> int:
        for s in range(len(self.times) - 1):
            if t <= self.times[s + 1]:
                return s
        return len(self.times) - 2

    def _inverse_mode(self, label: int, s: int) -> bool:
        a, b = self.knots[label][s], self.knots[label][s + 1]
        return self.through_inf[label][s] or is_inf(a) or is_inf(b)

    def value(self, label: int, t):
        s = self._segment(t)
        t0, t1 = self.times[s], self.times[s + 1]
        x = (t - t0) / (t1 - t0)
        a, b = self.knots[label][s], self.knots[label][s + 1]
        if self._inverse_mode(label, s):
            wa, wb = _inv(a), _inv(b)
            return _inv(wa + x * (wb - wa))
        return a + x * (b - a)

    def values(self, t) -> list:
        return [self.value(i, t) for i in range(self.n_labels)]


def _linear_roots(c0, c1) -> list:
    """Roots of ``c0 + c1 x`` in (0, 1]."""
    if c1 == 0:
        if c0 == 0:
            raise NonGenericPath("two norms agree along a whole segment")
        return []
    x = -c0 / c1
    return [x] if 0 < x <= 1 else []


def _quadratic_roots(a, b, c) -> list:
    if a == 0:
        return _linear_roots(c, b)
    a, b, c = float(a), float(b), float(c)
    disc = b * b - 4 * a * c
    if disc < 0:
        return []
    r = math.sqrt(disc)
    q = -0.5 * (b + math.copysign(r, b)) if b != 0 else -0.5 * r if r else 0.0
    roots = set()
    if q != 0:
        roots.add(q / a)
        roots.add(c / q)
    else:
        roots.add(0.0)
    return [x for x in roots if 0 < x <= 1]


def _pair_candidates(path: ValuePath, i: int, j: int, s: int) -> list:
    """Local parameters in (0, 1] where |v_i| may equal |v_j| on segment ``s``."""
    ki, kj = path.knots[i], path.knots[j]
    inv_i, inv_j = path._inverse_mode(i, s), path._inverse_mode(j, s)
    if not inv_i and not inv_j:
        pa, pb, qa, qb = ki[s], ki[s + 1], kj[s], kj[s + 1]
        out = []
        for eps in (1, -1):
            out += _linear_roots(pa - eps * qa, (pb - pa) - eps * (qb - qa))
        return out
    if inv_i and inv_j:
        wa, wb, xa, xb = _inv(ki[s]), _inv(ki[s + 1]), _inv(kj[s]), _inv(kj[s + 1])
        out = []
        for eps in (1, -1):
            out += _linear_roots(wa - eps * xa, (wb - wa) - eps * (xb - xa))
        return out
    if inv_i:
        i, j = j, i
        ki, kj = kj, ki
    pa, pb = ki[s], ki[s + 1]
    wa, wb = _inv(kj[s]), _inv(kj[s + 1])
    dp, dw = pb - pa, wb - wa
    out = []
    for eps in (1, -1):
        out += _quadratic_roots(dp * dw, pa * dw + wa * dp, pa * wa - eps)
    return out


def _moving(path: ValuePath, label: int, s: int) -> bool:
    return path.knots[label][s] != path.knots[label][s + 1] or path.through_inf[label][s]


def _order_at(path: ValuePath, t, rtol: float) -> list[int]:
    vals = path.values(t)
    order = sorted(range(len(vals)), key=lambda i: norm_key(vals[i]))
    for a, b in zip(order, order[1:]):
        if norm_cmp(vals[a], vals[b], rtol) == 0:
            raise NonGenericPath(f"norms of labels {a} and {b} tie at t={t}")
    return order


def _adjacent_swaps(before: list[int], after: list[int]) -> list[tuple[int, int]]:
    """Bubble-sort word turning ``before`` into ``after``, as label pairs."""
    cur = list(before)
    pos = {lab: k for k, lab in enumerate(after)}
    swaps = []
    changed = True
    while changed:
        changed = False
        for k in range(len(cur) - 1):
            if pos[cur[k]] > pos[cur[k + 1]]:
                swaps.append((cur[k], cur[k + 1]))
                cur[k], cur[k + 1] = cur[k + 1], cur[k]
                changed = True
    return swaps


def _sign(v) -> int:
    if is_inf(v):
        return 0
    v = v.real if isinstance(v, complex) else v
    return (v > 0) - (v < 0)


def crossing_times(path: ValuePath, rtol: float = 1e-9) -> list[tuple[Any, list[tuple[int, int]]]]:
    """Times at which the norm order changes, with the adjacent swaps there."""
    n = path.n_labels
    cands = set()
    for s in range(len(path.times) - 1):
        t0, t1 = path.times[s], path.times[s + 1]
        movers = [i for i in range(n) if _moving(path, i, s)]
        seen = set()
        for i in movers:
            for j in range(n):
                key = (min(i, j), max(i, j))
                if j == i or key in seen:
                    continue
                seen.add(key)
                for x in _pair_candidates(path, i, j, s):
                    cands.add(t0 + x * (t1 - t0))
        cands.add(t1)
    t_end = path.times[-1]
    points = [path.times[0]] + sorted((t for t in cands if t < t_end), key=float) + [t_end]
    order = _order_at(path, points[0], rtol)
    out = []
    for a, b in zip(points, points[1:]):
        if a == b:
            continue
        if isinstance(a, float) or isinstance(b, float):
            mid = (float(a) + float(b)) / 2
        else:
            mid = (a + b) / 2
        mid_order = _order_at(path, mid, rtol)
        if mid_order != order:
            out.append((a, _adjacent_swaps(order, mid_order)))
            order = mid_order
    if _order_at(path, t_end, rtol) != order:
        raise NonGenericPath("norm order changes at the end of the path")
    return out


def slide_along(T: ValuedTableau, path: ValuePath, rtol: float = 1e-9) -> tuple[ValuedTableau, list[SlideEvent]]:
    """Follow ``T`` along ``path``; labels are matched to entries by value."""
    start = path.start()
    if Counter(start) != Counter(T.values()):
        raise ValueError("path does not start at the tableau's entries")
    box_of = {i: T.box_of(v) for i, v in enumerate(start)}
    for t in path.times:
        if not satisfies_restrictions(T.shape, path.values(t)):
            raise ValueError(f"path leaves the allowed values at t={t}")
    events: list[SlideEvent] = []
    for t, swaps in crossing_times(path, rtol):
        vals = path.values(t)
        for a, b in swaps:
            va, vb = vals[a], vals[b]
            if is_inf(va) or is_inf(vb) or va == 0 or vb == 0:
                raise NonGenericPath(f"labels {a},{b} tie at 0 or infinity")
            ba, bb = box_of[a], box_of[b]
            adjacent = ba[0] == bb[0] or ba[1] == bb[1]
            swapped = adjacent or _sign(va) == _sign(vb)
            if swapped:
                box_of[a], box_of[b] = bb, ba
            events.append(SlideEvent(t, a, b, adjacent, swapped))
    end = path.end()
    out = ValuedTableau.from_dict(T.shape, {box_of[i]: end[i] for i in range(len(end))})
    return out, events


def _one_sign(T: ValuedTableau) -> int:
    signs = {_sign(v) for v in T.values()}
    if len(signs) > 1 or 0 in signs:
        raise ValueError("tableau entries must all have one sign")
    return signs.pop() if signs else 1


def _shape_of(bound, inner_boxes, boxes) -> SkewShape:
    inner = Partition.from_boxes(bound, inner_boxes)
    outer = Partition.from_boxes(bound, list(inner_boxes) + list(boxes))
    return SkewShape(outer, inner)


def switch(T: ValuedTableau, U: ValuedTableau) -> tuple[ValuedTableau, ValuedTableau]:
    """Return ``(slide_U(T), slide_T(U))``.

    The inner tableau's entries grow in magnitude, one at a time, until
    they exceed every entry of the outer one.
    """
    if len(U) == 0:
        return T, U
    if len(T) == 0:
        return T, U
    if U.shape.outer == T.shape.inner:
        inner, outer, t_is_inner = U, T, False
    elif T.shape.outer == U.shape.inner:
        inner, outer, t_is_inner = T, U, True
    else:
        raise ValueError("shapes are not adjacent")
    s_in, s_out = _one_sign(inner), _one_sign(outer)
    if s_in == s_out:
        s_out = -s_in
    oi, oo = ordinalize(inner), ordinalize(outer)
    m, k = len(oi), len(oo)
    union = {}
    for b, r in oi.entries:
        union[b] = Fraction(s_in * r)
    for b, r in oo.entries:
        union[b] = Fraction(s_out * (m + r))
    bound = T.shape.bound
    shape = SkewShape(outer.shape.outer, inner.shape.inner)
    W = ValuedTableau.from_dict(shape, union)
    start = [union[b] for b in shape.boxes()]
    label = {v: i for i, v in enumerate(start)}
    top = m + k
    steps = [(label[Fraction(s_in * r)], Fraction(s_in * (top + m + 1 - r))) for r in range(1, m + 1)]
    W1, _ = slide_along(W, ValuePath.moves(start, steps))
    inner_vals = {Fraction(s_in * (top + m + 1 - r)) for r in range(1, m + 1)}
    moved_in = {b: v for b, v in W1.entries if v in inner_vals}
    moved_out = {b: v for b, v in W1.entries if v not in inner_vals}
    base = inner.shape.inner.boxes()
    out_shape = _shape_of(bound, base, moved_out)
    in_shape = _shape_of(bound, base + list(moved_out), moved_in)
    new_outer = ordinalize(ValuedTableau.from_dict(out_shape, moved_out))
    new_inner = ordinalize(ValuedTableau.from_dict(in_shape, moved_in))
    new_outer = relabel(new_outer, outer.values())
    new_inner = relabel(new_inner, inner.values())
    if t_is_inner:
        return new_inner, new_outer
    return new_outer, new_inner


def superstandard(lam: Partition, sign: int = 1) -> ValuedTableau:
    """Row-reading filling 1..|lam| of the straight shape ``lam``."""
    ent, k = {}, 0
    for b in lam.boxes():
        k += 1
        ent[b] = Fraction(sign * k)
    return ValuedTableau.from_dict(SkewShape.straight(lam), ent)


def _inner_filling(T: ValuedTableau, choice: int = 0) -> ValuedTableau:
    mu = T.shape.inner
    sign = -_one_sign(T)
    if choice == 0:
        return superstandard(mu, sign)
    options = ordinal_syt(SkewShape.straight(mu))
    O = options[choice % len(options)]
    return O.map_values(lambda i: Fraction(sign * i))


def rectify(T: ValuedTableau, choice: int = 0) -> ValuedTableau:
    """Straight-shape rectification; ``choice`` picks the auxiliary inner filling."""
    _one_sign(T)
    if T.shape.is_straight:
        return T
    if not T.shape.size:
        return ValuedTableau(SkewShape.straight(Partition.of(T.shape.bound)), ())
    return switch(T, _inner_filling(T, choice))[0]


def rect_shape(T: ValuedTableau) -> Partition:
    return rectify(T).shape.outer


def equivalent(T: ValuedTableau, T2: ValuedTableau) -> bool:
    return ordinalize(rectify(T)) == ordinalize(rectify(T2))


def _dual_witness(T: ValuedTableau, full: bool = False) -> tuple:
    """Positions the fixed inner and outer fillings occupy after switching with ``T``."""
    sign = -_one_sign(T)
    bound = T.shape.bound
    keys = []
    mu = T.shape.inner
    inners = [superstandard(mu, sign)]
    if full and mu.size:
        inners = [O.map_values(lambda i: Fraction(sign * i)) for O in ordinal_syt(SkewShape.straight(mu))]
    for V in inners:
        if V.shape.size:
            keys.append(ordinalize(switch(T, V)[1]).entries)
    comp = SkewShape(bound.full(), T.shape.outer)
    if comp.size:
        outs = ordinal_syt(comp) if full else ordinal_syt(comp)[:1]
        for O in outs:
            Vh = O.map_values(lambda i: Fraction(sign * i))
            keys.append(ordinalize(switch(T, Vh)[1]).entries)
    return tuple(keys)


def dual_equivalent(T: ValuedTableau, T2: ValuedTableau, full: bool = False) -> bool:
    if T.shape != T2.shape:
        raise ValueError("dual equivalence needs equal shapes")
    return _dual_witness(T, full) == _dual_witness(T2, full)


def dual_classes(shape: SkewShape, nu: Partition | None = None) -> list[list[ValuedTableau]]:
    """Dual equivalence classes of SYT(shape), optionally only rect shape ``nu``."""
    groups: dict = defaultdict(list)
    for O in ordinal_syt(shape):
        if nu is not None and rect_shape(O) != nu:
            continue
        groups[_dual_witness(O)].append(O)
    return [groups[k] for k in sorted(groups, key=repr)]


def equivalence_classes(shape: SkewShape) -> list[list[ValuedTableau]]:
    groups: dict = defaultdict(list)
    for O in ordinal_syt(shape):
        groups[rectify(O).entries].append(O)
    return [groups[k] for k in sorted(groups, key=repr)]


def lr_methods(lam: Partition, mu: Partition, nu: Partition) -> tuple[int, int, int]:
    """The three counts of the Littlewood-Richardson number."""
    if lam.size != mu.size + nu.size or not mu <= lam:
        return 0, 0, 0
    shape = SkewShape(lam, mu)
    by_dual = len(dual_classes(shape, nu))
    eq_sizes = [len(c) for c in equivalence_classes(shape) if rect_shape(c[0]) == nu]
    if len(set(eq_sizes)) > 1:
        raise AssertionError(f"equivalence classes of shape {nu} differ in size: {eq_sizes}")
    by_class = eq_sizes[0] if eq_sizes else 0
    target = superstandard(nu).entries
    by_target = sum(1 for O in ordinal_syt(shape) if rectify(O).entries == target)
    return by_dual, by_class, by_target


def lr_number(lam: Partition, mu: Partition, nu: Partition) -> int:
    a, b, c = lr_methods(lam, mu, nu)
    if not a == b == c:
        raise AssertionError(f"Littlewood-Richardson counts disagree: {a}, {b}, {c}")
    return a


def promotion(O: ValuedTableau) -> ValuedTableau:
    """Remove 1, slide the hole outward, put N at the end, decrement."""
    ent = O.as_dict()
    m = len(ent)
    hole = next(b for b, v in ent.items() if v == 1)
    while True:
        r, c = hole
        nbrs = [b for b in ((r, c + 1), (r + 1, c)) if b in ent]
        if not nbrs:
            break
        nxt = min(nbrs, key=lambda b: ent[b])
        ent[hole] = ent[nxt]
        hole = nxt
    ent[hole] = m + 1
    return ValuedTableau.from_dict(O.shape, {b: v - 1 for b, v in ent.items()})


def evacuation_step(T: ValuedTableau) -> ValuedTableau:
    if T.shape.outer != T.shape.bound.full() or not T.shape.is_straight:
        raise ValueError("evacuation step needs the full rectangle")
    O = ordinalize(T)
    return relabel(promotion(O), T.values())


def s_kL(T: ValuedTableau, k: int, L: int) -> ValuedTableau:
    O = ordinalize(T)
    if not 1 <= k < len(O):
        raise ValueError(f"k must lie in 1..{len(O) - 1}")
    ent = O.as_dict()
    bk = next(b for b, v in ent.items() if v == k)
    bk1 = next(b for b, v in ent.items() if v == k + 1)
    if box_distance(bk, bk1) == L:
        ent[bk], ent[bk1] = k + 1, k
    return relabel(ValuedTableau.from_dict(O.shape, ent), T.values())


def dual_class_sizes_ok(shape: SkewShape) -> bool:
    return all(len(c) == syt_count(rect_shape(c[0])) for c in dual_classes(shape))
