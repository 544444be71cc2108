"""Standard Young tableaux whose entries are compared by norm.

Entries may be exact numbers (``int`` / ``Fraction``), floats, the
sentinel :data:`INF`, or any object exposing ``norm_key()`` and
``is_zero()`` (the jets of :mod:`wronski_jdt.leadterms`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Any, Iterable

from .partitions import Box, Partition, RectBound, SkewShape

NORM_RTOL = 1e-9


class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


def is_inf(v: Any) -> bool:
    if v is INF:
        return True
    check = getattr(v, "is_inf", None)
    return bool(check()) if callable(check) else False


def is_zero(v: Any) -> bool:
    if v is INF:
        return False
    check = getattr(v, "is_zero", None)
    if callable(check):
        return bool(check())
    return v == 0


def norm_key(v: Any):
    """Comparable stand-in for the norm of ``v``."""
    if v is INF:
        return math.inf
    key = getattr(v, "norm_key", None)
    if callable(key):
        return key()
    return abs(v)


def _exact(x) -> bool:
    return isinstance(x, Rational)


def norm_cmp(a: Any, b: Any, rtol: float = NORM_RTOL) -> int:
    """Three-way norm comparison; floats tie within relative ``rtol``."""
    ka, kb = norm_key(a), norm_key(b)
    if ka == kb:
        return 0
    if not (_exact(ka) and _exact(kb)) and math.isfinite(ka) and math.isfinite(kb):
        if math.isclose(float(ka), float(kb), rel_tol=rtol, abs_tol=0.0):
            return 0
    return -1 if ka < kb else 1


def parse_value(s: Any):
    """Inverse of :func:`format_value` for the JSON form."""
    if isinstance(s, str):
        if s.strip().lower() in ("inf", "infinity", "∞"):
            return INF
        try:
            return Fraction(s)
        except ValueError:
            return float(s)
    if isinstance(s, bool):
        raise TypeError("booleans are not tableau values")
    if isinstance(s, int):
        return Fraction(s)
    return s


def format_value(v: Any) -> str:
    if v is INF:
        return "inf"
    if isinstance(v, Fraction) and v.denominator == 1:
        return str(v.numerator)
    return str(v)


@dataclass(frozen=True)
class ValuedTableau:
    """A filling of ``shape``; ``entries`` is stored row-major."""

    shape: SkewShape
    entries: tuple[tuple[Box, Any], ...]

    def __post_init__(self) -> None:
        ent = dict(self.entries)
        if len(ent) != len(self.entries):
            raise ValueError("a box is filled twice")
        boxes = self.shape.boxes()
        if set(ent) != set(boxes):
            raise ValueError("entries do not match the shape's boxes")
        object.__setattr__(self, "entries", tuple((b, ent[b]) for b in boxes))

    @classmethod
    def from_dict(cls, shape: SkewShape, entries: dict) -> "ValuedTableau":
        return cls(shape, tuple(entries.items()))

    @classmethod
    def from_grid(cls, grid, bound: RectBound) -> "ValuedTableau":
        """Rows of values, with ``None`` marking boxes of the inner shape."""
        outer, inner, ent = [], [], {}
        for r, row in enumerate(grid, start=1):
            skip = 0
            while skip < len(row) and row[skip] is None:
                skip += 1
            inner.append(skip)
            outer.append(len(row))
            for c in range(skip, len(row)):
                if row[c] is None:
                    raise ValueError("None only allowed at the start of a row")
                ent[(r, c + 1)] = row[c]
        shape = SkewShape(Partition(tuple(outer), bound), Partition(tuple(inner), bound))
        return cls.from_dict(shape, ent)

    def __getitem__(self, box: Box):
        for b, v in self.entries:
            if b == box:
                return v
        raise KeyError(box)

    def as_dict(self) -> dict:
        return dict(self.entries)

    def boxes(self) -> list[Box]:
        return [b for b, _ in self.entries]

    def values(self) -> list:
        return [v for _, v in self.entries]

    def box_of(self, value) -> Box:
        for b, v in self.entries:
            if v == value:
                return b
        raise KeyError(value)

    def __len__(self) -> int:
        return len(self.entries)

    def rows(self) -> list[list]:
        """Grid form, ``None`` for inner boxes."""
        out = []
        for r, (p, q) in enumerate(zip(self.shape.outer.parts, self.shape.inner.parts), start=1):
            if p == 0:
                break
            out.append([None] * q + [self[(r, c)] for c in range(q + 1, p + 1)])
        return out

    def map_values(self, f) -> "ValuedTableau":
        return ValuedTableau(self.shape, tuple((b, f(v)) for b, v in self.entries))

    def to_json(self) -> dict:
        return {
            "shape": self.shape.to_json(),
            "entries": [
                {"row": r, "col": c, "value": format_value(v)} for (r, c), v in self.entries
            ],
        }

    @classmethod
    def from_json(cls, obj: dict, bound: RectBound) -> "ValuedTableau":
        shape = SkewShape.from_json(obj["shape"], bound)
        ent = {(int(e["row"]), int(e["col"])): parse_value(e["value"]) for e in obj["entries"]}
        return cls.from_dict(shape, ent)

    def __str__(self) -> str:
        cells = [[("." if v is None else format_value(v)) for v in row] for row in self.rows()]
        width = max((len(c) for row in cells for c in row), default=1)
        return "\n".join(" ".join(c.rjust(width) for c in row) for row in cells)


OrdTableau = ValuedTableau


def _neighbour_pairs(T: ValuedTableau):
    ent = T.as_dict()
    for (r, c), v in ent.items():
        if (r, c + 1) in ent:
            yield v, ent[(r, c + 1)]
        if (r + 1, c) in ent:
            yield v, ent[(r + 1, c)]


def satisfies_restrictions(shape: SkewShape, values: Iterable) -> bool:
    """Restrictions on zero (nonempty inner shape) and infinity (non-full outer shape)."""
    values = list(values)
    if shape.inner.size > 0 and any(is_zero(v) for v in values):
        return False
    if shape.outer != shape.bound.full() and any(is_inf(v) for v in values):
        return False
    return True


def validate(T: ValuedTableau, require_distinct_norms: bool = False, rtol: float = NORM_RTOL) -> bool:
    if any(norm_cmp(a, b, rtol) >= 0 for a, b in _neighbour_pairs(T)):
        return False
    if not satisfies_restrictions(T.shape, T.values()):
        return False
    if require_distinct_norms:
        vals = sorted(T.values(), key=norm_key)
        if any(norm_cmp(a, b, rtol) == 0 for a, b in zip(vals, vals[1:])):
            return False
    return True


def is_weakly_increasing(T: ValuedTableau, rtol: float = NORM_RTOL) -> bool:
    return all(norm_cmp(a, b, rtol) <= 0 for a, b in _neighbour_pairs(T))


def is_diagonally_increasing(T: ValuedTableau, rtol: float = NORM_RTOL) -> bool:
    if not is_weakly_increasing(T, rtol):
        raise ValueError("tableau is not weakly increasing")
    ent = T.as_dict()
    for (r, c), v in ent.items():
        w = ent.get((r + 1, c + 1))
        if w is not None and norm_cmp(v, w, rtol) >= 0:
            return False
    return True


def norm_order(values: Iterable, rtol: float = NORM_RTOL) -> list:
    """Values sorted by norm; raises on ties."""
    vals = sorted(values, key=norm_key)
    for a, b in zip(vals, vals[1:]):
        if norm_cmp(a, b, rtol) == 0:
            raise ValueError(f"ambiguous ordinal: |{a}| = |{b}|")
    return vals


def ordinalize(T: ValuedTableau, rtol: float = NORM_RTOL) -> ValuedTableau:
    order = sorted(T.entries, key=lambda e: norm_key(e[1]))
    for (_, a), (_, b) in zip(order, order[1:]):
        if norm_cmp(a, b, rtol) == 0:
            raise ValueError(f"ambiguous ordinal: |{a}| = |{b}|")
    rank = {box: i for i, (box, _) in enumerate(order, start=1)}
    return ValuedTableau(T.shape, tuple((b, rank[b]) for b, _ in T.entries))


def relabel(O: ValuedTableau, values: Iterable) -> ValuedTableau:
    """Put the i-th smallest (by norm) of ``values`` where ``O`` has ordinal i."""
    vals = norm_order(values)
    if len(vals) != len(O):
        raise ValueError("size mismatch")
    return O.map_values(lambda i: vals[i - 1])


def restrict(T: ValuedTableau, values: Iterable, as_tableau: bool = True, rtol: float = NORM_RTOL):
    """Boxes holding ``values``; with ``as_tableau`` the subtableau itself."""
    wanted = list(values)
    ent = T.as_dict()
    boxes = [b for b, v in ent.items() if any(v == w for w in wanted)]
    if len(boxes) != len(wanted):
        raise ValueError("values are not all entries of the tableau")
    if not as_tableau:
        return boxes
    O = ordinalize(T, rtol)
    ranks = sorted(O[b] for b in boxes)
    if not ranks:
        empty = T.shape.inner
        return ValuedTableau(SkewShape(empty, empty), ())
    if ranks != list(range(ranks[0], ranks[-1] + 1)):
        raise ValueError("not a subtableau: values are not norm-consecutive")
    below = [b for b in ent if O[b] < ranks[0]]
    bound = T.shape.bound
    inner = Partition.from_boxes(bound, T.shape.inner.boxes() + below)
    outer = Partition.from_boxes(bound, T.shape.inner.boxes() + below + boxes)
    return ValuedTableau.from_dict(SkewShape(outer, inner), {b: ent[b] for b in boxes})


def ordinal_syt(shape: SkewShape) -> list[ValuedTableau]:
    """All ordinary standard tableaux of ``shape``, in reading-word order."""
    out: list[ValuedTableau] = []
    target = shape.outer.parts
    d = len(target)

    def grow(parts: list[int], filling: dict, k: int) -> None:
        if k > shape.size:
            out.append(ValuedTableau.from_dict(shape, dict(filling)))
            return
        for r in range(d):
            if parts[r] < target[r] and (r == 0 or parts[r - 1] > parts[r]):
                parts[r] += 1
                filling[(r + 1, parts[r])] = k
                grow(parts, filling, k + 1)
                del filling[(r + 1, parts[r])]
                parts[r] -= 1

    grow(list(shape.inner.parts), {}, 1)
    out.sort(key=lambda t: t.values())
    return out


def enumerate_syt(shape: SkewShape, values: Iterable) -> list[ValuedTableau]:
    vals = list(values)
    if len(vals) != shape.size:
        raise ValueError(f"need {shape.size} values, got {len(vals)}")
    ordered = norm_order(vals)
    return [O.map_values(lambda i: ordered[i - 1]) for O in ordinal_syt(shape)]
