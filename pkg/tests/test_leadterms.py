import cmath
import itertools
import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import assume, given, strategies as st

from strategies import nonzero_fractions
from wronski_jdt.leadterms import (
    Jet,
    UnsupportedTies,
    critical_ratio,
    diamond_ratio,
    elementary_lead,
    entry_order,
    gt_check,
    jacobian,
    jacobian_det,
    lead_pluckers,
    min_shapes,
    omega_product,
    omega_vector,
    partner,
    predicted_pluckers,
    residuals,
    solve_distinct,
    solve_full,
    solve_tworoots,
    two_root_discriminant,
    weight_vector,
)
from wronski_jdt.partitions import Partition, RectBound, SkewShape, all_partitions, box_distance, cover_diamonds, q_weight
from wronski_jdt.tableaux import ValuedTableau, ordinal_syt, relabel

B24 = RectBound(2, 4)


def P(*parts, bound=B24):
    return Partition.of(bound, parts)


@pytest.fixture
def example():
    return ValuedTableau.from_grid([[None, Jet(4, 1)], [Jet(1, 0), Jet(1, 0)]], B24)


def brute_elementary(jets, i):
    # expand the (m-i)-th elementary symmetric function monomial by monomial
    k = len(jets) - i
    terms = {}
    for S in itertools.combinations(jets, k):
        v = sum((j.val for j in S), F(0))
        c = math.prod((j.coeff for j in S), start=F(1))
        terms[v] = terms.get(v, 0) + c
    return terms[min(terms)]


def random_distinct_tableau(rng, bound):
    shape = SkewShape.straight(bound.full())
    O = rng.choice(ordinal_syt(shape))
    vals = sorted({F(rng.randint(-40, 40), rng.randint(1, 3)) for _ in range(3 * len(O))}, reverse=True)
    vals = rng.sample(vals, len(O)) if len(vals) >= len(O) else None
    if vals is None:
        return random_distinct_tableau(rng, bound)
    jets = [Jet(F(rng.choice([-1, 1]) * rng.randint(1, 9), rng.randint(1, 5)), v) for v in vals]
    return relabel(O, jets)


class TestJet:
    def test_zero_coefficient(self):
        with pytest.raises(ValueError):
            Jet(0, 1)

    def test_product(self):
        assert Jet(2, F(1, 2)) * Jet(3, 1) == Jet(6, F(3, 2))
        assert (Jet(2) * Jet.zero()).is_zero()
        assert (Jet(2) * Jet.infinity()).is_inf()
        with pytest.raises(ZeroDivisionError):
            Jet.zero() * Jet.infinity()

    def test_from_terms(self):
        assert Jet.from_terms({1: 4, 2: 2}) == Jet(4, 1)
        assert Jet.from_terms({1: 0}).is_zero()

    def test_norm_order(self):
        assert Jet(1, 2).norm_key() < Jet(1, 1).norm_key()

    def test_at(self):
        assert Jet(3, 2).at(0.1) == pytest.approx(0.03)

    @pytest.mark.parametrize("j", [Jet(F(3, 4), F(-1, 2)), Jet(1j + 2, 1), Jet.zero(), Jet.infinity()])
    def test_json_roundtrip(self, j):
        assert Jet.from_json(j.to_json()) == j


class TestElementaryLead:
    def test_example(self):
        a = [Jet(4, 1), Jet(1), Jet(1)]
        assert [elementary_lead(a, i) for i in range(4)] == [4, 1, 2, 1]

    def test_cancellation(self):
        a = [Jet(1, 1), Jet(-1, 1)]
        assert elementary_lead(a, 0) == -1 and elementary_lead(a, 1) == 0

    def test_range(self):
        with pytest.raises(ValueError):
            elementary_lead([Jet(1)], 2)

    @given(st.lists(st.tuples(nonzero_fractions, st.integers(-3, 3)), min_size=1, max_size=6), st.data())
    def test_matches_expansion(self, raw, data):
        jets = [Jet(c, v) for c, v in raw]
        i = data.draw(st.integers(0, len(jets) - 1))
        assert elementary_lead(jets, i) == brute_elementary(jets, i)


class TestMinShapes:
    def test_example(self, example):
        assert [min_shapes(example, i) for i in range(3)] == [[P(1)], [P(2)], [P(2, 1)]]

    def test_distinct_norms_give_restriction_shapes(self):
        rng = random.Random(4)
        for _ in range(20):
            T = random_distinct_tableau(rng, RectBound(2, 5))
            order = entry_order(T)
            for i in range(len(order) + 1):
                small = set(order[:i])
                (nu,) = min_shapes(T, i)
                assert set(nu.boxes()) == small

    def test_tied_pair(self):
        T = ValuedTableau.from_grid([[Jet(1, 3), Jet(2, 2)], [Jet(5, 2), Jet(1, 1)]], B24)
        assert sorted(min_shapes(T, 2), key=lambda p: p.parts) == [P(1, 1), P(2)]


class TestOmegaProduct:
    omega = {(1, 2): F(6), (2, 1): F(1, 3), (2, 2): F(1)}
    shape = SkewShape(P(2, 2), P(1))

    def test_outer(self):
        assert omega_product(self.omega, P(2, 2), self.shape) == 1

    def test_example(self):
        assert omega_product(self.omega, P(1), self.shape) == 2

    def test_outside_interval(self):
        assert omega_product(self.omega, P(), self.shape) == 0
        assert omega_product(self.omega, P(1, 1), self.shape) == F(6)


class TestSolveDistinct:
    def test_one_box(self):
        b = RectBound(1, 2)
        T = ValuedTableau.from_grid([[Jet(F(5), 0)]], b)
        assert solve_distinct(T) == {(1, 1): F(5) * q_weight(b.full()) / q_weight(Partition.of(b, ()))}

    def test_square(self):
        c = [F(3), F(-2), F(7, 2), F(1, 5)]
        T = ValuedTableau.from_grid([[Jet(c[0], 3), Jet(c[1], 2)], [Jet(c[2], 1), Jet(c[3], 0)]], B24)
        # chain q-values 1, 2, 3, 2, 1
        assert solve_distinct(T) == {(1, 1): 2 * c[0], (1, 2): F(3, 2) * c[1], (2, 1): F(2, 3) * c[2], (2, 2): c[3] / 2}

    def test_tie_rejected(self, example):
        with pytest.raises(ValueError):
            solve_distinct(example)

    @pytest.mark.parametrize("d,n", [(2, 4), (2, 5), (3, 6)])
    def test_residuals_vanish(self, d, n):
        rng = random.Random(d * 100 + n)
        b = RectBound(d, n)
        for _ in range(500 if b.N < 9 else 150):
            T = random_distinct_tableau(rng, b)
            om = solve_distinct(T)
            assert all(r == 0 for r in residuals(T, om))

    @pytest.mark.parametrize("d,n", [(2, 5), (3, 6)])
    def test_jacobian_upper_triangular(self, d, n):
        rng = random.Random(n)
        for _ in range(20):
            T = random_distinct_tableau(rng, RectBound(d, n))
            J = jacobian(T, solve_distinct(T))
            m = len(J)
            assert all(J[i][j] == 0 for i in range(m) for j in range(m) if j < i)
            assert all(J[i][i] != 0 for i in range(m))
            assert jacobian_det(T, solve_distinct(T)) != 0


class TestWorkedExample:
    def test_solution(self, example):
        (sol,) = solve_full(example)
        assert [sol.omega[b] for b in entry_order(example)] == [F(6), F(1, 3), F(1)]

    def test_jacobian(self, example):
        (sol,) = solve_full(example)
        w1, w2, w3 = F(6), F(1, 3), F(1)
        assert jacobian(example, sol.omega) == [[2 * w2 * w3, 2 * w1 * w3, 2 * w1 * w2], [0, 3 * w3, 3 * w2], [0, 0, 2]]
        assert sol.det == 4

    def test_lead_pluckers(self, example):
        (sol,) = solve_full(example)
        lp = lead_pluckers(example, sol.omega)
        assert lp[P(1, 1)] == Jet(6, 1) and lp[P(2, 2)] == Jet(1, 0) and lp[P()].is_zero()

    def test_predicted(self, example):
        (sol,) = solve_full(example)
        pp = predicted_pluckers(example, sol.omega, 1e-2)
        assert pp[P(2, 2)] == 1 and pp[P()] == 0
        assert pp[P(1)] == pytest.approx(2e-2)


# -- the tied pair -------------------------------------------------------------

DIAMOND = (P(1), P(2), P(1, 1), P(2, 1))


def tied(ck, ck1):
    return ValuedTableau.from_grid([[Jet(F(3), 3), Jet(ck, 2)], [Jet(ck1, 2), Jet(F(1, 2), 1)]], B24)


class TestTwoRoots:
    def test_ratio(self):
        assert diamond_ratio(*DIAMOND) == F(3, 4)

    def test_example(self):
        res = solve_tworoots(*DIAMOND, 1, -1)
        assert res.discriminant == 3 and not res.degenerate
        assert all(isinstance(x, float) for pair in res.pairs for x in pair)

    def test_zero_coefficient(self):
        with pytest.raises(ValueError):
            solve_tworoots(*DIAMOND, 1, 0)

    def test_pairs_solve_system(self):
        lo, a, a2, hi = DIAMOND
        ck, ck1 = F(2), F(-7)
        for wa, wb in solve_tworoots(*DIAMOND, ck, ck1).pairs:
            assert q_weight(a2) * wa + q_weight(a) * wb == pytest.approx(float(q_weight(hi) * (ck + ck1)))
            assert q_weight(lo) * wa * wb == pytest.approx(float(q_weight(hi) * ck * ck1))

    def test_partner(self):
        # 4/3 ratio gives a perfect-square discriminant for c = (3, 1)
        res = solve_tworoots(*DIAMOND, 3, 1)
        (p0, p1) = res.pairs
        assert partner(*DIAMOND, *p0) == pytest.approx(p1)

    @given(st.sampled_from(sorted({d for d in cover_diamonds(RectBound(3, 6))}, key=repr)), nonzero_fractions, nonzero_fractions)
    def test_real_coefficients_positive(self, diamond, ck, ck1):
        res = solve_tworoots(diamond.bottom, diamond.left, diamond.right, diamond.top, ck, ck1)
        assert res.discriminant > 0
        if ck * ck1 > 0:
            assert res.discriminant > (ck - ck1) ** 2

    def test_solve_full_two_real(self):
        for ck, ck1 in [(F(1), F(-1)), (F(2), F(5)), (F(-3), F(1, 7))]:
            sols = solve_full(tied(ck, ck1))
            assert len(sols) == 2
            for s in sols:
                assert all(isinstance(w, (F, float)) for w in s.omega.values())
                assert s.det != 0
                assert all(abs(r) < 1e-12 for r in residuals(tied(ck, ck1), s.omega))

    def test_jacobian_degenerates_with_discriminant(self):
        r, _ = critical_ratio(2)
        T = tied(r, F(1))
        sols = solve_full(T)
        assert all(abs(s.det) < 1e-9 for s in sols)
        far = solve_full(tied(-r, F(1)))
        assert all(abs(s.det) > 1e-3 for s in far)

    def test_unsupported(self):
        # equal valuations everywhere: two consecutive indices have two minimizers
        T = ValuedTableau.from_grid([[Jet(1, 1), Jet(2, 1), Jet(3, 1)], [Jet(3, 1), Jet(1, 1), Jet(5, 1)]], RectBound(2, 5))
        with pytest.raises(UnsupportedTies):
            solve_full(T)


class TestCriticalRatio:
    def test_L2(self):
        r1, r2 = critical_ratio(2)
        assert r1 == pytest.approx(complex(0.5, math.sqrt(3) / 2))
        assert r2 == pytest.approx(r1.conjugate())

    @pytest.mark.parametrize("L", range(2, 9))
    def test_annihilates_discriminant(self, L):
        for r in critical_ratio(L):
            assert abs(r) == pytest.approx(1, abs=1e-15)
            assert abs(r.imag) > 0
            assert abs(two_root_discriminant(r + 1, r, 1 - 1 / L**2)) < 1e-14

    def test_large_L(self):
        r, _ = critical_ratio(10**6)
        assert abs(r - 1) < 1e-5

    def test_small_L(self):
        with pytest.raises(ValueError):
            critical_ratio(1)


class TestGT:
    def test_omega_vectors_pass(self):
        rng = random.Random(9)
        for d, n in [(2, 4), (2, 5), (3, 6)]:
            b = RectBound(d, n)
            shape = SkewShape.straight(b.full())
            om = {bx: F(rng.randint(1, 9), rng.randint(1, 9)) for bx in shape.boxes()}
            assert gt_check(omega_vector(om, shape))

    def test_perturbed_fails(self):
        shape = SkewShape.straight(RectBound(2, 5).full())
        om = {bx: F(k + 2, 3) for k, bx in enumerate(shape.boxes())}
        c = omega_vector(om, shape)
        c[Partition.of(shape.bound, (2, 1))] += 1
        assert not gt_check(c)

    def test_single_coordinate(self):
        c = {lam: F(0) for lam in all_partitions(B24)}
        c[B24.full()] = F(1)
        assert gt_check(c)

    def test_predicted_pluckers_pass(self, example):
        (sol,) = solve_full(example)
        assert gt_check(predicted_pluckers(example, sol.omega, 0.5), tol=1e-12)


class TestWeights:
    @pytest.mark.parametrize("d,n", [(2, 4), (2, 5), (3, 6)])
    def test_distinct_for_distinct_tableaux(self, d, n):
        b = RectBound(d, n)
        jets = [Jet(1, F(b.N - k, 2)) for k in range(b.N)]
        vecs = [tuple(sorted(weight_vector(relabel(O, jets)).items(), key=lambda kv: kv[0].parts)) for O in ordinal_syt(SkewShape.straight(b.full()))]
        assert len(set(vecs)) == len(vecs)

    def test_full_has_zero_weight(self, example):
        assert weight_vector(example)[B24.full()] == 0
