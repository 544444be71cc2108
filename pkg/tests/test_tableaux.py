import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from wronski_jdt.partitions import Partition, RectBound, SkewShape, syt_count
from wronski_jdt.tableaux import (
    INF,
    ValuedTableau,
    enumerate_syt,
    is_diagonally_increasing,
    norm_cmp,
    ordinal_syt,
    ordinalize,
    parse_value,
    relabel,
    restrict,
    validate,
)

from strategies import skew_shapes

B24 = RectBound(2, 4)
B37 = RectBound(3, 7)


def P(*parts, bound=B24):
    return Partition.of(bound, parts)


def grid(rows, bound=B24):
    return ValuedTableau.from_grid([[None if v is None else F(v) for v in r] for r in rows], bound)


@pytest.fixture
def sliding_example():
    # nine-box tableau over {1, 2, 5} and {-7, ..., -22}
    return grid([[None, 5, -7, -16], [1, -10, -13, -22], [2, -19]], B37)


class TestValidate:
    def test_single_box(self):
        T = ValuedTableau.from_dict(SkewShape.straight(P(1)), {(1, 1): F(5)})
        assert validate(T) and validate(T, True)

    def test_tied_norms_in_row(self):
        T = ValuedTableau.from_dict(SkewShape.straight(P(2)), {(1, 1): F(3), (1, 2): F(-3)})
        assert not validate(T) and not validate(T, True)

    def test_sliding_example(self, sliding_example):
        assert validate(sliding_example, True)

    def test_zero_needs_straight_shape(self):
        T = grid([[None, 0], [1, 2]])
        assert not validate(T)

    def test_infinity_needs_full_outer(self):
        T = ValuedTableau.from_dict(SkewShape.straight(P(1)), {(1, 1): INF})
        assert not validate(T)
        full = ValuedTableau.from_dict(SkewShape.straight(P(2, 2)), {(1, 1): F(1), (1, 2): F(2), (2, 1): F(3), (2, 2): INF})
        assert validate(full, True)

    @given(st.data())
    def test_scaling_invariance(self, data):
        shape = data.draw(skew_shapes())
        if shape.size == 0:
            return
        vals = data.draw(st.lists(st.integers(-40, 40).filter(bool), min_size=shape.size, max_size=shape.size))
        T = ValuedTableau.from_dict(shape, dict(zip(shape.boxes(), map(F, vals))))
        c = data.draw(st.sampled_from([F(2), F(-3), F(1, 5), F(-7, 2)]))
        assert validate(T) == validate(T.map_values(lambda v: c * v))
        assert validate(T, True) == validate(T.map_values(lambda v: c * v), True)


class TestOrdinalize:
    def test_one_box(self):
        T = ValuedTableau.from_dict(SkewShape.straight(P(1)), {(1, 1): F(2)})
        assert ordinalize(T).values() == [1]

    def test_sliding_example(self, sliding_example):
        O = ordinalize(sliding_example)
        by_norm = sorted(sliding_example.values(), key=abs)
        assert [sliding_example[O.box_of(i)] for i in range(1, 10)] == by_norm
        assert by_norm[:4] == [1, 2, 5, -7] and by_norm[-1] == -22

    def test_fixed_point(self):
        O = ordinal_syt(SkewShape.straight(P(2, 2)))[0]
        assert ordinalize(O) == O

    def test_tie(self):
        T = ValuedTableau.from_dict(SkewShape(P(2, 1), P(1)), {(1, 2): F(2), (2, 1): F(-2)})
        with pytest.raises(ValueError, match="ambiguous ordinal"):
            ordinalize(T)


class TestRestrict:
    def test_everything(self, sliding_example):
        assert restrict(sliding_example, sliding_example.values()) == sliding_example

    def test_small_positive_entries(self, sliding_example):
        S = restrict(sliding_example, [F(1), F(2), F(5)])
        assert S.as_dict() == {(1, 2): 5, (2, 1): 1, (3, 1): 2}
        assert S.shape == SkewShape(P(2, 1, 1, bound=B37), P(1, bound=B37))

    def test_largest_entry(self, sliding_example):
        S = restrict(sliding_example, [F(-22)])
        assert len(S) == 1 and S.shape.size == 1

    def test_not_consecutive(self, sliding_example):
        with pytest.raises(ValueError, match="not a subtableau"):
            restrict(sliding_example, [F(1), F(5)])

    def test_every_consecutive_run_is_valid(self, sliding_example):
        vals = sorted(sliding_example.values(), key=abs)
        for i, j in itertools.combinations(range(len(vals) + 1), 2):
            S = restrict(sliding_example, vals[i:j])
            assert validate(S, True) and sorted(S.values(), key=abs) == vals[i:j]


class TestEnumerate:
    def test_square(self):
        assert len(enumerate_syt(SkewShape.straight(P(2, 2)), [1, 2, 3, 4])) == 2

    def test_row(self):
        assert len(enumerate_syt(SkewShape.straight(P(2)), [5, -7])) == 1

    def test_incomparable_boxes(self):
        assert len(enumerate_syt(SkewShape(P(2, 1), P(1)), [F(1), F(2)])) == 2

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            enumerate_syt(SkewShape.straight(P(2)), [1])

    @given(skew_shapes())
    def test_ordinal_set_is_exactly_syt(self, shape):
        vals = [F((-1) ** i * (i + 1)) for i in range(shape.size)]
        tabs = enumerate_syt(shape, vals)
        ords = {ordinalize(T).entries for T in tabs}
        assert len(ords) == len(tabs) == syt_count(shape)
        assert all(validate(T, True) for T in tabs)
        assert ords == {O.entries for O in ordinal_syt(shape)}

    def test_relabel_inverts_ordinalize(self, sliding_example):
        assert relabel(ordinalize(sliding_example), sliding_example.values()) == sliding_example


class TestDiagonallyIncreasing:
    def test_distinct_norms(self):
        assert is_diagonally_increasing(grid([[1, 2], [3, 4]]))

    def test_antidiagonal_tie(self):
        assert is_diagonally_increasing(grid([[1, 2], [2, 3]]))

    def test_diagonal_strict_despite_row_ties(self):
        assert is_diagonally_increasing(grid([[2, 2], [2, 3]]))

    def test_diagonal_tie(self):
        assert not is_diagonally_increasing(grid([[2, 2], [2, 2]]))
        assert not is_diagonally_increasing(grid([[1, 2, 2], [2, 2, 2]], RectBound(2, 5)))

    def test_not_weakly_increasing(self):
        with pytest.raises(ValueError):
            is_diagonally_increasing(grid([[1, 3], [2, 2]]))


class TestValues:
    def test_infinity_is_largest(self):
        assert norm_cmp(F(10**9), INF) < 0 and norm_cmp(INF, INF) == 0

    def test_parse(self):
        assert parse_value("inf") is INF and parse_value("-13") == -13 and parse_value("1/3") == F(1, 3)

    def test_json_round_trip(self, sliding_example):
        assert ValuedTableau.from_json(sliding_example.to_json(), B37) == sliding_example
