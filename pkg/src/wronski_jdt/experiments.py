"""Experiment suites behind ``wronski-jdt verify`` and the acceptance tests.

Every suite is a function returning a :class:`SuiteResult`; randomness
comes from ``numpy.random.default_rng(seed)`` so runs are reproducible.
"""

from __future__ import annotations

import functools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

import numpy as np

from .partitions import Partition, RectBound, SkewShape, all_partitions, cover_diamonds, partitions_of_size, syt_count

DEFAULT_BOUNDS = ((2, 4), (2, 5), (3, 6))


@dataclass
class SuiteResult:
    name: str
    passed: bool
    summary: str
    details: list[dict] = field(default_factory=list)
    seconds: float = 0.0

    def to_json(self) -> dict:
        return {
            "suite": self.name,
            "passed": self.passed,
            "summary": self.summary,
            "details": self.details,
        }


def _timed(name: str):
    def wrap(fn: Callable[..., SuiteResult]):
        @functools.wraps(fn)
        def run(*args, **kw) -> SuiteResult:
            t0 = time.perf_counter()
            res = fn(*args, **kw)
            res.seconds = time.perf_counter() - t0
            return res

        run.suite_name = name
        return run

    return wrap


def _bounds(bounds) -> list[RectBound]:
    return [RectBound(d, n) for d, n in (bounds or DEFAULT_BOUNDS)]


def _err(e: Exception) -> str:
    return f"{type(e).__name__}: {e}"[:300]


# -- exact suites --------------------------------------------------------------


@_timed("paper-example")
def worked_example(seed: int = 0) -> SuiteResult:
    """The three-box tableau over jets ``4u + 2u^2, 1, 1`` in the 2x2 rectangle."""
    from .leadterms import Jet, entry_order, jacobian, lead_pluckers, solve_full
    from .tableaux import ValuedTableau

    b = RectBound(2, 4)
    T = ValuedTableau.from_grid([[None, Jet(4, 1)], [Jet(1, 0), Jet(1, 0)]], b)
    sols = solve_full(T)
    F = Fraction
    want_omega = [F(6), F(1, 3), F(1)]
    w1, w2, w3 = want_omega
    want_J = [[2 * w2 * w3, 2 * w1 * w3, 2 * w1 * w2], [0, 3 * w3, 3 * w2], [0, 0, 2]]
    P = lambda *p: Partition.of(b, p)
    want_lt = {P(1, 0): Jet(2, 1), P(1, 1): Jet(6, 1), P(2, 0): Jet(F(1, 3), 0), P(2, 1): Jet(1, 0), P(2, 2): Jet(1, 0)}
    checks = {"one_solution": len(sols) == 1}
    if sols:
        om = sols[0].omega
        order = entry_order(T)
        got = [om[bx] for bx in order]
        checks["omega"] = got == want_omega and all(isinstance(x, Fraction) for x in got)
        checks["jacobian"] = jacobian(T, om) == want_J
        lt = lead_pluckers(T, om)
        checks["lead_pluckers"] = all(lt[nu] == j for nu, j in want_lt.items()) and lt[P(0, 0)].coeff == 0
        checks["nonsingular"] = sols[0].det != 0
        omega_txt = ", ".join(str(x) for x in got)
    else:
        omega_txt = "none"
    ok = all(checks.values())
    return SuiteResult("paper-example", ok, f"omega = ({omega_txt})", [checks])


@_timed("distance-lemma")
def distance_identity(seed: int = 0, max_side: int = 4) -> SuiteResult:
    """Diamond weight ratio equals ``1 - L^-2`` for every cover diamond up to ``max_side``."""
    from .leadterms import distance_identity_holds

    total, bad = 0, []
    for d in range(1, max_side + 1):
        for w in range(1, max_side + 1):
            for D in cover_diamonds(RectBound(d, d + w)):
                total += 1
                if not distance_identity_holds(D.bottom, D.left, D.right, D.top):
                    bad.append({"d": d, "n": d + w, "bottom": list(D.bottom.parts)})
    return SuiteResult("distance-lemma", not bad and total > 0, f"{total - len(bad)}/{total} diamonds", bad)


def _random_nonzero_fraction(rng: np.random.Generator, size: int, top: int = 10**6) -> list[Fraction]:
    num = rng.integers(1, top, size=size) * rng.choice([-1, 1], size=size)
    den = rng.integers(1, top, size=size)
    return [Fraction(int(a), int(b)) for a, b in zip(num, den)]


@_timed("two-roots")
def two_roots(seed: int = 0, pairs: int = 10_000, max_side: int = 4) -> SuiteResult:
    """Discriminant of the tied-pair quadratic over random nonzero real pairs.

    The quadratic depends on a diamond only through its weight ratio, so
    diamonds sharing a ratio share the sample; every diamond up to
    ``max_side`` is mapped to its ratio.
    """
    from .leadterms import diamond_ratio, two_root_discriminant

    rng = np.random.default_rng(seed)
    ratios: dict[Fraction, int] = {}
    for d in range(1, max_side + 1):
        for w in range(1, max_side + 1):
            for D in cover_diamonds(RectBound(d, d + w)):
                r = diamond_ratio(D.bottom, D.left, D.right, D.top)
                ratios[r] = ratios.get(r, 0) + 1
    details, ok = [], True
    for r in sorted(ratios):
        ck = _random_nonzero_fraction(rng, pairs)
        ck1 = _random_nonzero_fraction(rng, pairs)
        pos = strict = same_sign = 0
        for a, b in zip(ck, ck1):
            disc = two_root_discriminant(a + b, a * b, r)
            pos += disc > 0
            if a * b > 0:
                same_sign += 1
                strict += disc > (a - b) ** 2
        good = pos == pairs and strict == same_sign
        ok &= good
        details.append({"ratio": str(r), "diamonds": ratios[r], "positive": pos, "same_sign": same_sign, "above_gap": strict})
    return SuiteResult("two-roots", ok, f"{len(ratios)} ratios over {sum(ratios.values())} diamonds, {pairs} pairs each", details)


@_timed("gt")
def gt_relations(seed: int = 0, bounds=None, trials: int = 1000) -> SuiteResult:
    """Omega-generated vectors satisfy the GT relations; perturbing one entry breaks them.

    Only entries incomparable with some other partition take part in a
    nontrivial relation, so only those are perturbed.
    """
    from .leadterms import gt_check, omega_vector

    rng = np.random.default_rng(seed)
    details, ok = [], True
    for b in _bounds(bounds):
        shape = SkewShape.straight(b.full())
        boxes = shape.boxes()
        lams = all_partitions(b)
        movable = [l for l in lams if any(not (l <= m or m <= l) for m in lams)]
        passed = caught = 0
        for _ in range(trials):
            om = dict(zip(boxes, _random_nonzero_fraction(rng, len(boxes), 1000)))
            c = omega_vector(om, shape)
            passed += gt_check(c)
            nu = movable[int(rng.integers(len(movable)))]
            c2 = dict(c)
            c2[nu] = c2[nu] + _random_nonzero_fraction(rng, 1, 1000)[0]
            caught += not gt_check(c2)
        good = passed == trials and caught == trials
        ok &= good
        details.append({"d": b.d, "n": b.n, "passed": passed, "perturbations_caught": caught, "trials": trials})
    return SuiteResult("gt", ok, "; ".join(f"{x['d']}x{x['n'] - x['d']}: {x['passed']}/{x['perturbations_caught']}/{trials}" for x in details), details)


@_timed("lr")
def lr_rule(seed: int = 0, bounds=((2, 5), (2, 6), (3, 6))) -> SuiteResult:
    """Three LR counts agree; dual class sizes; each class meets each dual class once."""
    from .jdt import dual_classes, equivalence_classes, lr_methods, rect_shape
    from .tableaux import ordinal_syt

    details, ok = [], True
    for d, n in bounds:
        b = RectBound(d, n)
        triples = disagree = size_bad = meet_bad = shapes = 0
        lams = all_partitions(b)
        for lam in lams:
            for mu in lams:
                if not mu <= lam:
                    continue
                for nu in partitions_of_size(b, lam.size - mu.size):
                    triples += 1
                    m = lr_methods(lam, mu, nu)
                    disagree += len(set(m)) > 1
                shape = SkewShape(lam, mu)
                if not shape.size:
                    continue
                shapes += 1
                duals = dual_classes(shape)
                size_bad += any(len(c) != syt_count(rect_shape(c[0])) for c in duals)
                for E in equivalence_classes(shape):
                    eset = {O.entries for O in E}
                    nu = rect_shape(E[0])
                    for D in duals:
                        if rect_shape(D[0]) == nu:
                            meet_bad += sum(O.entries in eset for O in D) != 1
        good = disagree == size_bad == meet_bad == 0
        ok &= good
        details.append({"bound": f"{d}x{n - d}", "triples": triples, "disagree": disagree, "skew_shapes": shapes, "dual_size_fail": size_bad, "intersection_fail": meet_bad})
    return SuiteResult("lr", ok, "; ".join(f"{x['bound']}: {x['triples']} triples, {x['disagree']} disagree" for x in details), details)


# -- numerical suites --------------------------------------------------------------


@_timed("fiber-degree")
def fiber_degree(seed: int = 0, bounds=None, beta: float | None = None) -> SuiteResult:
    """Fiber over separated roots: count, residuals, separation and labels."""
    from .tableaux import ordinal_syt, ordinalize
    from .tracker import TOL_NEWTON, label_point, point_distance, separated_roots, solve_fiber

    details, ok = [], True
    for b in _bounds(bounds):
        t0 = time.perf_counter()
        roots = separated_roots(b, beta)
        try:
            pts = solve_fiber(b, roots)
        except Exception as e:
            ok = False
            details.append({"d": b.d, "n": b.n, "error": _err(e)})
            continue
        sec = time.perf_counter() - t0
        want = syt_count(b.full())
        resid = max(q.residual for q in pts)
        dist = min((point_distance(x, y) for i, x in enumerate(pts) for y in pts[i + 1 :]), default=math.inf)
        labels = {ordinalize(label_point(q, roots)).entries for q in pts}
        syt = {O.entries for O in ordinal_syt(SkewShape.straight(b.full()))}
        good = len(pts) == want and resid <= TOL_NEWTON and dist >= 1e-6 and labels == syt and sec < 60
        ok &= good
        details.append({"d": b.d, "n": b.n, "points": len(pts), "expected": want, "max_residual": resid, "min_distance": dist, "labels_bijective": labels == syt, "under_a_minute": sec < 60})
    return SuiteResult("fiber-degree", ok, ", ".join(f"{x['d']}x{x['n'] - x['d']}: {x.get('points', 'err')}" for x in details), details)


def _imag_after_phase(q) -> float:
    p = q.plucker_array()
    p = p / p[int(np.argmax(np.abs(p)))]
    return float(np.max(np.abs(p.imag)))


@_timed("reality")
def reality(seed: int = 0, bounds=None, trials: int = 20, tol: float = 1e-8) -> SuiteResult:
    """Fibers over random real roots are real after normalizing the phase."""
    from .tracker import solve_fiber

    rng = np.random.default_rng(seed)
    details, ok = [], True
    for b in _bounds(bounds):
        worst, good, errors = 0.0, 0, []
        for k in range(trials):
            roots = [float(x) for x in rng.uniform(-5, 5, size=b.N)]
            try:
                pts = solve_fiber(b, roots, seed=seed + k)
            except Exception as e:
                errors.append(_err(e))
                continue
            im = max(_imag_after_phase(q) for q in pts)
            worst = max(worst, im)
            good += im <= tol and len(pts) == syt_count(b.full())
        ok &= good == trials
        details.append({"d": b.d, "n": b.n, "real": good, "trials": trials, "worst_imag": worst, "errors": errors})
    return SuiteResult("reality", ok, ", ".join(f"{x['d']}x{x['n'] - x['d']}: {x['real']}/{trials}" for x in details), details)


@_timed("geomslide")
def geomslide(seed: int = 0, bounds=None, trials: int = 50, waypoints: dict | None = None) -> SuiteResult:
    """Random real order-preserving paths: tracked labels against the sliding prediction."""
    from .tracker import label_point, predict_slide, random_real_path, separated_endpoint, solve_base_fiber, track

    waypoints = waypoints or {}
    details, ok = [], True
    for b in _bounds(bounds):
        rng = np.random.default_rng([seed, b.d, b.n])
        beta = 1e3 if b.N <= 6 else 1e2
        wp = waypoints.get((b.d, b.n), 2 if b.N <= 6 else 1)
        start = separated_endpoint(rng, b.N, beta)
        base = solve_base_fiber(b, start)
        match, errors, events = 0, [], 0
        for _ in range(trials):
            path = random_real_path(rng, start, beta, waypoints=wp)
            try:
                ends, _ = track(path, base)
                endvals = path.end()
                good = True
                for p0, e in zip(base, ends):
                    pred, ev = predict_slide(p0.label, path)
                    events += len(ev)
                    good &= label_point(e, endvals).entries == pred.entries
                match += good
            except Exception as e:
                errors.append(_err(e))
        ok &= match == trials
        details.append({"d": b.d, "n": b.n, "match": match, "trials": trials, "slide_events": events, "errors": errors})
    return SuiteResult("geomslide", ok, ", ".join(f"{x['d']}x{x['n'] - x['d']}: {x['match']}/{trials}" for x in details), details)


@_timed("skl")
def skl_loops(seed: int = 0, bounds=((2, 5), (3, 6)), L_values: Sequence[int] = (2, 3)) -> SuiteResult:
    """Monodromy of each ``s_{k,L}`` loop against the tableau operator."""
    from .jdt import s_kL
    from .tracker import expected_perm, loop_skl, monodromy, separated_roots, solve_base_fiber

    details, ok = [], True
    for b in _bounds(bounds):
        roots = separated_roots(b)
        base = solve_base_fiber(b, roots)
        for k in range(1, b.N):
            for L in L_values:
                want = expected_perm(base, lambda T: s_kL(T, k, L))
                try:
                    res = monodromy(loop_skl(roots, k, L, bound=b), base)
                    got, err = res.perm, None
                except Exception as e:
                    got, err = None, _err(e)
                good = got == want
                ok &= good
                details.append({"d": b.d, "n": b.n, "k": k, "L": L, "match": good, "perm": got, "expected": want, "error": err})
    n_ok = sum(x["match"] for x in details)
    return SuiteResult("skl", ok, f"{n_ok}/{len(details)} loops match", details)


ROTATION_BOUNDS = {4: (2, 4), 6: (2, 5), 9: (3, 6)}


@_timed("rotation")
def rotation(seed: int = 0, sizes: Sequence[int] = (4, 6, 9)) -> SuiteResult:
    """Rotation loop monodromy against the evacuation step, and its N-th power."""
    from .jdt import evacuation_step
    from .tracker import expected_perm, loop_rotation, monodromy, perm_power, separated_roots, solve_base_fiber

    details, ok = [], True
    for N in sizes:
        b = RectBound(*ROTATION_BOUNDS[N])
        roots = separated_roots(b)
        base = solve_base_fiber(b, roots)
        want = expected_perm(base, evacuation_step)
        try:
            got, err = monodromy(loop_rotation(roots), base).perm, None
        except Exception as e:
            got, err = None, _err(e)
        ident = got is not None and perm_power(got, N) == list(range(len(base)))
        good = got == want and ident
        ok &= good
        details.append({"N": N, "d": b.d, "n": b.n, "match": got == want, "power_identity": ident, "perm": got, "expected": want, "error": err})
    return SuiteResult("rotation", ok, ", ".join(f"N={x['N']}: {'MATCH' if x['match'] else 'MISMATCH'}" for x in details), details)


@_timed("trivial-loops")
def trivial_loops(seed: int = 0, bounds=None, trials: int = 10, avoid: Sequence[Any] = (None, 0.0)) -> SuiteResult:
    """Random real loops that never meet a fixed point of RP^1 (alternating choices)."""
    from .tracker import monodromy, random_real_loop, separated_roots, solve_base_fiber

    details, ok = [], True
    for b in _bounds(bounds):
        rng = np.random.default_rng([seed, b.d, b.n, 7])
        roots = separated_roots(b)
        base = solve_base_fiber(b, roots)
        ident, errors = 0, []
        for k in range(trials):
            w = avoid[k % len(avoid)]
            try:
                ident += monodromy(random_real_loop(rng, roots, avoid=w, waypoints=2), base).is_identity()
            except Exception as e:
                errors.append(_err(e))
        ok &= ident == trials
        details.append({"d": b.d, "n": b.n, "identity": ident, "trials": trials, "errors": errors})
    return SuiteResult("trivial-loops", ok, ", ".join(f"{x['d']}x{x['n'] - x['d']}: {x['identity']}/{trials}" for x in details), details)


def _dual_keys(base, roots, block):
    from .jdt import _dual_witness
    from .tableaux import ordinalize, restrict

    bv = [roots[i] for i in block]
    keys = []
    for q in base:
        S = restrict(q.label, bv)
        inside = set(S.as_dict())
        outside = tuple(sorted((bx, v) for bx, v in ordinalize(q.label).as_dict().items() if bx not in inside))
        keys.append((outside, S.shape, _dual_witness(ordinalize(S))))
    return keys


def _groups(keys) -> list[list[int]]:
    out: dict = {}
    for i, k in enumerate(keys):
        out.setdefault(k, []).append(i)
    return sorted(out.values())


def _partition_invariant(groups: list[list[int]], perm: Sequence[int]) -> bool:
    return sorted(sorted(perm[i] for i in g) for g in groups) == sorted(sorted(g) for g in groups)


LIMIT_BLOCKS = {(2, 4): ([1, 2],), (2, 5): ([1, 2], [2, 3], [1, 3])}


@_timed("limits")
def limits(seed: int = 0, blocks: dict | None = None, tol: float = 1e-6) -> SuiteResult:
    """Limits under contracting a middle block cluster by dual equivalence.

    Also checks each limit's Schubert position at ``c`` and that ``s_{k,L}``
    loops on ordinals outside the block permute whole clusters.
    """
    from .jdt import rect_shape, s_kL
    from .tableaux import ordinalize, restrict
    from .tracker import (
        compress_fiber,
        expected_perm,
        limit_clusters,
        limit_points,
        loop_skl,
        monodromy,
        schubert_at,
        separated_roots,
        solve_base_fiber,
    )

    blocks = blocks or LIMIT_BLOCKS
    details, ok = [], True
    for (d, n), blist in blocks.items():
        b = RectBound(d, n)
        roots = separated_roots(b)
        base = solve_base_fiber(b, roots)
        comp, r3 = compress_fiber(base, roots)
        for block in blist:
            lo, hi = block[0], block[-1]
            idx = list(range(lo, hi + 1))
            c = math.sqrt(r3[lo] * r3[hi])
            entry = {"d": d, "n": n, "block": [lo + 1, hi + 1], "c": c}
            try:
                lims = limit_points(comp, r3, idx, c)
            except Exception as e:
                ok = False
                entry["error"] = _err(e)
                details.append(entry)
                continue
            clusters = sorted(sorted(g) for g in limit_clusters(lims, tol))
            expected = _groups(_dual_keys(comp, r3, idx))
            schub = []
            for q, lim in zip(comp, lims):
                S = restrict(q.label, [r3[i] for i in idx])
                schub.append(schubert_at(lim.point, c, len(idx), tol) == [rect_shape(ordinalize(S))])
            inv = []
            for k in range(1, b.N):
                if k - 1 in idx or k in idx:
                    continue
                for L in (2, 3):
                    want = expected_perm(base, lambda T: s_kL(T, k, L))
                    if want == list(range(len(base))):
                        continue
                    try:
                        got = monodromy(loop_skl(roots, k, L, bound=b), base).perm
                    except Exception as e:
                        got = None
                        entry.setdefault("errors", []).append(_err(e))
                    inv.append({"k": k, "L": L, "match": got == want, "clusters_preserved": got is not None and _partition_invariant(clusters, got)})
            good = clusters == expected and all(schub) and all(x["match"] and x["clusters_preserved"] for x in inv)
            ok &= good
            entry.update({"clusters": clusters, "expected": expected, "schubert_ok": all(schub), "cycles": [x.cycle for x in lims], "skl_outside": inv, "passed": good})
            details.append(entry)
    return SuiteResult("limits", ok, ", ".join(f"{x['d']}x{x['n'] - x['d']} {x['block']}: {'ok' if x.get('passed') else 'FAIL'}" for x in details), details)


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "paper-example": worked_example,
    "fiber-degree": fiber_degree,
    "reality": reality,
    "geomslide": geomslide,
    "skl": skl_loops,
    "rotation": rotation,
    "trivial-loops": trivial_loops,
    "distance-lemma": distance_identity,
    "two-roots": two_roots,
    "gt": gt_relations,
    "lr": lr_rule,
    "limits": limits,
}

# acceptance criterion number -> suite
CRITERIA = {
    1: "paper-example",
    2: "fiber-degree",
    3: "reality",
    4: "geomslide",
    5: "skl",
    6: "rotation",
    7: "trivial-loops",
    8: "distance-lemma",
    9: "two-roots",
    10: "gt",
    11: "lr",
    12: "limits",
}
