import io
import json
import math

import numpy as np
import pytest

from wronski_jdt.jdt import evacuation_step, rectify, s_kL
from wronski_jdt.partitions import Partition, RectBound, SkewShape, syt_count
from wronski_jdt.tableaux import INF, ValuedTableau, ordinal_syt, ordinalize, relabel, restrict
from wronski_jdt.tracker import (
    TOL_NEWTON,
    AmbiguousMatch,
    FiberSystem,
    RootPath,
    compress_fiber,
    expected_perm,
    fiber_seed,
    fiber_system,
    homogeneous,
    label_point,
    limit_clusters,
    limit_points,
    load_path,
    loop_rotation,
    loop_skl,
    mobius_points,
    monodromy,
    newton_refine,
    perm_power,
    point_distance,
    point_from_basis,
    point_from_pluckers,
    predict_slide,
    random_real_loop,
    random_real_path,
    schubert_at,
    separated_roots,
    slog,
    sexp,
    solve_base_fiber,
    solve_fiber,
    track,
    winding_number,
)
from wronski_jdt.wronski import SubspaceBasis, roots_multiset

B24 = RectBound(2, 4)
B25 = RectBound(2, 5)


@pytest.fixture(scope="module")
def base24():
    roots = separated_roots(B24, 1e3)
    return roots, solve_base_fiber(B24, roots)


def labels(points):
    return sorted(tuple(ordinalize(q.label).entries) for q in points)


class TestFiberSystem:
    def test_top_monomials(self):
        x = point_from_basis(SubspaceBasis([[0, 0, 1], [0, 0, 0, 1]], 4))
        assert fiber_system(B24, [0, 0, 0, 0]).residual(x) < 1e-15

    def test_all_infinite_is_degenerate(self):
        with pytest.raises(ValueError):
            fiber_system(B24, [INF] * 4)

    def test_wrong_count(self):
        with pytest.raises(ValueError):
            fiber_system(B24, [1, 2, 3])

    def test_own_roots(self):
        rng = np.random.default_rng(0)
        for d, n in [(2, 4), (2, 5), (3, 6)]:
            A = rng.normal(size=(d, n)) + 1j * rng.normal(size=(d, n))
            x = SubspaceBasis.from_matrix(A)
            assert fiber_system(RectBound(d, n), list(roots_multiset(x))).residual(point_from_basis(x)) <= 1e-10

    def test_some_infinite_roots(self):
        x = SubspaceBasis([[1, 0, 1], [0, 1]], 4)  # Wronskian 1 - z^2: two finite roots
        r = list(roots_multiset(x))
        assert sum(1 for v in r if v == INF) == 2
        assert fiber_system(B24, r).residual(point_from_basis(x)) <= 1e-12

    def test_wrong_point(self):
        x = point_from_basis(SubspaceBasis([[0, 0, 1], [0, 0, 0, 1]], 4))
        assert FiberSystem(B24, [1, 2, 3, 4]).residual(x) > 1e-3


class TestSeedsAndNewton:
    def test_positive_seed(self):
        roots = separated_roots(B24, 1e3)
        T = relabel(ordinal_syt(SkewShape.straight(B24.full()))[0], roots)
        p = fiber_seed(T).p
        assert np.all(p.real > 0) and np.all(p.imag == 0)

    def test_one_dimensional(self):
        b = RectBound(1, 2)
        T = ValuedTableau.from_dict(SkewShape.straight(b.full()), {(1, 1): 5.0})
        pt = newton_refine(fiber_seed(T), [5.0])
        assert pt.residual <= TOL_NEWTON
        assert point_distance(pt, fiber_seed(T)) < 1e-12

    def test_seeds_differ_in_weights(self):
        roots = separated_roots(B24, 1e3)
        seeds = [fiber_seed(relabel(O, roots)) for O in ordinal_syt(SkewShape.straight(B24.full()))]
        assert point_distance(*seeds) > 0.5

    def test_refine(self, base24):
        roots, pts = base24
        assert len(pts) == 2 and all(q.residual <= TOL_NEWTON for q in pts)
        assert point_distance(*pts) > 1e-6

    def test_exact_point_unchanged(self, base24):
        roots, pts = base24
        again = newton_refine(pts[0], roots)
        assert point_distance(again, pts[0]) < 1e-12

    def test_basin(self, base24):
        roots, pts = base24
        rng = np.random.default_rng(3)
        q = pts[1]
        noisy = point_from_pluckers(B24, q.p * (1 + 1e-3 * rng.normal(size=q.p.shape)))
        back = newton_refine(noisy, roots)
        assert back.residual <= TOL_NEWTON and point_distance(back, q) < 1e-9


class TestSolveFiber:
    @pytest.mark.parametrize("bound", [B24, B25])
    def test_separated(self, bound):
        pts = solve_fiber(bound, separated_roots(bound))
        assert len(pts) == syt_count(bound.full())
        assert len(set(labels(pts))) == len(pts)

    @pytest.mark.parametrize(
        "roots",
        [[1.0, 2.0, 3.0, 4.0], [1j, -2.0, 3 + 1j, 0.5], [0.0, 1.0, 2.0, INF], [-3.0, -1.0, 1.0, 3.0]],
    )
    def test_counts(self, roots):
        pts = solve_fiber(B24, roots)
        assert len(pts) == 2
        assert all(fiber_system(B24, roots).residual(q) <= 1e-10 for q in pts)
        assert point_distance(*pts) >= 1e-6

    def test_count_2x3(self):
        assert len(solve_fiber(B25, [1.0, -2.0, 3.0, 5.0, -7.0, 11.0])) == 5

    def test_wrong_count(self):
        with pytest.raises(ValueError):
            solve_fiber(B24, [1.0, 2.0])

    def test_real_roots_give_real_points(self):
        pts = solve_fiber(B25, [-4.0, -1.0, 0.5, 2.0, 3.0, 9.0])
        for q in pts:
            assert np.max(np.abs(q.p.imag)) <= 1e-8


class TestLabels:
    def test_bijective(self, base24):
        roots, pts = base24
        assert labels(pts) == sorted(tuple(O.entries) for O in ordinal_syt(SkewShape.straight(B24.full())))
        for q in pts:
            assert label_point(q, roots) == q.label

    def test_sign_flip(self, base24):
        roots, pts = base24
        for q in pts:
            flipped = point_from_pluckers(B24, -q.p)
            assert label_point(flipped, roots) == q.label

    def test_five_labels(self):
        roots = separated_roots(B25, 1e3)
        pts = solve_base_fiber(B25, roots)
        assert len({tuple(label_point(q, roots).entries) for q in pts}) == 5

    def test_unseparated_is_ambiguous(self):
        roots = [1.0, 1.5, 2.0, 2.5]
        pts = solve_fiber(B24, roots)
        with pytest.raises(AmbiguousMatch):
            for q in pts:
                label_point(q, roots)


class TestTrack:
    def test_constant(self, base24):
        roots, pts = base24
        ends, _ = track(RootPath.through([roots, roots]), pts)
        assert all(point_distance(a, b) < 1e-12 for a, b in zip(ends, pts))

    def test_round_trip(self, base24):
        roots, pts = base24
        path = RootPath.through([roots, [2.0, -30.0, 700.0, 5e4], [-1.0, 10.0, 1e2, -1e5]], interp="log")
        mid, _ = track(path, pts)
        back, _ = track(path.reversed(), mid)
        assert all(point_distance(a, b) < 1e-8 for a, b in zip(back, pts))

    def test_swap_matches_slide(self, base24):
        roots, pts = base24
        # the two middle moduli exchange places while one root changes sign
        path = RootPath.through([roots, [1e3, 1e9, -1e6, 1e12]], interp="log")
        ends, _ = track(path, pts)
        for q0, q1 in zip(pts, ends):
            pred, _ = predict_slide(q0.label, path)
            assert label_point(q1, path.end()) == pred

    def test_random_real_paths(self, base24):
        roots, pts = base24
        rng = np.random.default_rng(12)
        for _ in range(3):
            path = random_real_path(rng, roots, 1e3, waypoints=2)
            ends, _ = track(path, pts)
            end_roots = path.end()
            for q0, q1 in zip(pts, ends):
                assert label_point(q1, end_roots) == predict_slide(q0.label, path)[0]

    def test_discontinuous(self, base24):
        roots, pts = base24
        a = RootPath.through([roots, roots])
        b = RootPath.through([[1.0, 2.0, 3.0, 4.0], roots])
        with pytest.raises(ValueError):
            track(RootPath.chain([a, b]), pts)


class TestLoops:
    def test_skl_transposition(self, base24):
        roots, pts = base24
        res = monodromy(loop_skl(roots, 2, 2, B24), pts)
        assert res.perm == [1, 0]
        assert res.perm == expected_perm(pts, lambda T: s_kL(T, 2, 2))

    def test_skl_identity(self, base24):
        roots, pts = base24
        assert monodromy(loop_skl(roots, 1, 2, B24), pts).is_identity()

    def test_skl_winding(self, base24):
        roots, _ = base24
        loop = loop_skl(roots, 2, 2, B24)
        assert abs(winding_number(loop.ratio_curve, loop.critical)) == pytest.approx(1, abs=1e-6)

    def test_rotation(self):
        roots = separated_roots(B24)
        pts = solve_base_fiber(B24, roots)
        res = monodromy(loop_rotation(roots), pts)
        assert res.perm == expected_perm(pts, evacuation_step)
        assert perm_power(res.perm, 4) == [0, 1]

    @pytest.mark.parametrize("avoid", [None, 0.0])
    def test_trivial(self, base24, avoid):
        roots, pts = base24
        rng = np.random.default_rng(5)
        assert monodromy(random_real_loop(rng, roots, avoid=avoid, waypoints=2), pts).is_identity()

    def test_open_path_rejected(self, base24):
        roots, pts = base24
        with pytest.raises(ValueError):
            monodromy(RootPath.through([roots, [1.0, 2.0, 3.0, 4.0]]), pts)

    def test_sl2_conjugation(self, base24):
        roots, pts = base24
        loop = loop_skl(roots, 2, 2, B24)
        M = np.array([[0.0, 1.0], [-1.0, 0.0]])
        moved = mobius_points(pts, M)
        images = [-1 / a for a in roots]
        moved = [newton_refine(q, images) for q in moved]
        res = monodromy(loop.mobius(M), moved)
        assert res.perm == monodromy(loop, pts).perm


class TestLimits:
    def test_middle_block(self, base24):
        roots, pts = base24
        small, r3 = compress_fiber(pts, roots)
        c = math.sqrt(r3[1] * r3[2])
        lims = limit_points(small, r3, [1, 2], c)
        assert len(limit_clusters(lims)) == 2
        for q, L in zip(small, lims):
            block = restrict(q.label, [r3[1], r3[2]])
            assert schubert_at(L.point, c, 2) == [rectify(block).shape.outer]

    def test_whole_block(self, base24):
        roots, pts = base24
        small, r3 = compress_fiber(pts, roots)
        lims = limit_points(small, r3, [0, 1, 2, 3], 5.0, h_end=0.05)
        assert len(limit_clusters(lims)) == 1
        assert schubert_at(lims[0].point, 5.0, 4) == [B24.full()]

    def test_compress_requires_positive(self, base24):
        _, pts = base24
        with pytest.raises(ValueError):
            compress_fiber(pts, [-1.0, 2.0, 3.0, 4.0])


class TestPaths:
    def test_slog(self):
        for v in (-1e6, -2.5, 0.0, 3.0, 1e9):
            assert sexp(slog(v)) == pytest.approx(v)

    def test_json_roundtrip(self):
        path = RootPath.through([[1.0, 2.0, INF, -4.0], [1.0, 3.0, INF, -5.0]])
        again = load_path(io.StringIO(json.dumps(path.to_json())))
        for t in (0.0, 0.3, 1.0):
            assert np.allclose(np.abs(homogeneous(again.values(t))), np.abs(homogeneous(path.values(t))))

    def test_closing_segment(self):
        segs = [{"t0": 0, "t1": 0.5, "roots": [1, 2, 3, 4]}, {"t0": 0.5, "t1": 1, "roots": [1, 3, 2, 4]}]
        path = RootPath.from_json(segs)
        assert path.start() == path.end()

    def test_perm_power(self):
        assert perm_power([1, 2, 0], 3) == [0, 1, 2]
        assert perm_power([1, 2, 0], 1) == [1, 2, 0]
