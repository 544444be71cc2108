import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from wronski_jdt._exact import determinant
from wronski_jdt.partitions import (
    Partition,
    RectBound,
    SkewShape,
    all_partitions,
    box_distance,
    column_set,
    complement_rotate,
    cover_diamonds,
    hook_length_count,
    meet_join,
    partitions_of_size,
    q_weight,
    syt_count,
)

from strategies import SMALL_BOUNDS, bound_and_partition, skew_shapes

B24 = RectBound(2, 4)


def P(*parts, bound=B24):
    return Partition.of(bound, parts)


def brute_syt(shape: SkewShape) -> int:
    # count orderings of the boxes that respect rows and columns
    boxes = shape.boxes()
    count = 0
    for perm in itertools.permutations(range(1, len(boxes) + 1)):
        ent = dict(zip(boxes, perm))
        if all(ent[(r, c)] < ent[(r, c + 1)] for (r, c) in boxes if (r, c + 1) in ent) and all(
            ent[(r, c)] < ent[(r + 1, c)] for (r, c) in boxes if (r + 1, c) in ent
        ):
            count += 1
    return count


def q_by_determinant(lam: Partition) -> int:
    # Vandermonde determinant in k_j = j + lam_{d+1-j}
    d = lam.bound.d
    k = [j + lam.parts[d - j] for j in range(1, d + 1)]
    return determinant([[Fraction(kj) ** i for kj in k] for i in range(d)])


class TestRectBound:
    def test_N(self):
        assert RectBound(2, 4).N == 4
        assert RectBound(3, 6).N == 9

    @pytest.mark.parametrize("d,n", [(0, 3), (3, 3), (4, 2)])
    def test_invalid(self, d, n):
        with pytest.raises(ValueError):
            RectBound(d, n)


class TestPartition:
    def test_padding_and_validation(self):
        assert P(1).parts == (1, 0)
        with pytest.raises(ValueError):
            P(1, 2)
        with pytest.raises(ValueError):
            P(3, 0)

    def test_json_round_trip(self):
        lam = P(2, 1)
        assert lam.to_json() == {"d": 2, "n": 4, "parts": [2, 1]}
        assert Partition.from_json(lam.to_json()) == lam

    def test_containment_is_partial(self):
        assert not P(2, 0) <= P(1, 1) and not P(1, 1) <= P(2, 0)


class TestColumnSet:
    def test_empty(self):
        assert column_set(P()) == (1, 2)

    def test_one_box(self):
        assert column_set(P(1, 0)) == (1, 3)

    def test_full(self):
        assert column_set(P(2, 2)) == (3, 4)

    @given(bound_and_partition())
    def test_is_d_subset(self, bp):
        b, lam = bp
        J = column_set(lam)
        assert len(set(J)) == b.d and all(1 <= j <= b.n for j in J)


class TestQWeight:
    def test_one_box(self):
        assert q_weight(P(1, 0)) == 2

    def test_row_of_two(self):
        assert q_weight(P(2, 0)) == 3

    def test_full(self):
        assert q_weight(P(2, 2)) == 1

    def test_matches_determinant_up_to_4x4(self):
        for b in SMALL_BOUNDS:
            for lam in all_partitions(b):
                assert q_weight(lam) == q_by_determinant(lam) > 0

    def test_distance_identity_up_to_4x4(self):
        for b in SMALL_BOUNDS:
            for D in cover_diamonds(b):
                L = D.distance
                lhs = Fraction(q_weight(D.left) * q_weight(D.right), q_weight(D.bottom) * q_weight(D.top))
                assert lhs == 1 - Fraction(1, L * L)


class TestMeetJoin:
    def test_idempotent(self):
        assert meet_join(P(2, 1), P(2, 1)) == (P(2, 1), P(2, 1))

    def test_componentwise(self):
        assert meet_join(P(2, 0), P(1, 1)) == (P(1, 0), P(2, 1))

    def test_bounds(self):
        assert meet_join(P(), P(2, 1)) == (P(), P(2, 1))

    @given(st.sampled_from(SMALL_BOUNDS).flatmap(lambda b: st.tuples(*[st.sampled_from(all_partitions(b))] * 3)))
    def test_lattice_axioms(self, trip):
        x, y, z = trip
        m, j = meet_join(x, y)
        assert m <= x and m <= y and x <= j and y <= j
        assert meet_join(x, m)[1] == x and meet_join(x, j)[0] == x  # absorption
        m_xy_z = meet_join(m, z)[0]
        m_x_yz = meet_join(x, meet_join(y, z)[0])[0]
        assert m_xy_z == m_x_yz


class TestComplementRotate:
    def test_empty(self):
        shape, vee = complement_rotate(P())
        assert shape == SkewShape(P(2, 2), P()) and vee == P(2, 2)

    def test_two_one(self):
        shape, vee = complement_rotate(P(2, 1))
        assert shape == SkewShape(P(2, 2), P(2, 1)) and vee == P(1, 0)

    def test_full(self):
        shape, vee = complement_rotate(P(2, 2))
        assert shape.size == 0 and vee == P()

    @given(bound_and_partition())
    def test_involution(self, bp):
        _, lam = bp
        _, vee = complement_rotate(lam)
        assert complement_rotate(vee)[1] == lam
        assert vee.size == lam.bound.N - lam.size


class TestSytCount:
    def test_empty(self):
        assert syt_count(SkewShape(P(1, 1), P(1, 1))) == 1

    def test_2x2(self):
        assert syt_count(P(2, 2)) == 2

    def test_3x3(self):
        assert syt_count(RectBound(3, 6).full()) == 42

    @given(skew_shapes(bounds=[RectBound(2, 4), RectBound(2, 5), RectBound(3, 6), RectBound(3, 5)]))
    def test_against_brute_force(self, shape):
        if shape.size <= 7:
            assert syt_count(shape) == brute_syt(shape)

    def test_hook_length_agrees_with_enumeration(self):
        for b in [RectBound(2, 5), RectBound(3, 6), RectBound(4, 7)]:
            for lam in all_partitions(b):
                from wronski_jdt.partitions import _chain_count

                assert hook_length_count(lam) == _chain_count(lam.parts, b.empty().parts)

    @pytest.mark.parametrize("d,n", [(2, 4), (2, 5)])
    def test_consistency_sum(self, d, n):
        b = RectBound(d, n)
        full = syt_count(b.full())
        for k in range(b.N + 1):
            total = sum(syt_count(lam) * syt_count(SkewShape(b.full(), lam)) for lam in partitions_of_size(b, k))
            assert total == full


class TestBoxDistance:
    def test_adjacent(self):
        assert box_distance((1, 1), (1, 2)) == 1

    def test_diagonal(self):
        assert box_distance((1, 2), (2, 1)) == 2

    def test_far(self):
        assert box_distance((1, 3), (3, 1)) == 4

    def test_same_box(self):
        with pytest.raises(ValueError):
            box_distance((1, 1), (1, 1))
