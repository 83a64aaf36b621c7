import itertools

import numpy as np
import pytest

import oracles
from conftest import as_sets
from vcsat import (
    InvalidInputError,
    ResourceLimitError,
    SetFamily,
    SubsetMask,
    almost_shatters,
    missing_trace_index,
    sauer_bound,
    shattered_sets,
    shatters,
    trace,
    vc_dimension,
)
from vcsat.family import compress, expand, k_subsets, mask_of


def S(elements, n):
    return SubsetMask.of(elements, n)


class TestSubsetMask:
    def test_elements_and_size(self):
        s = S([1, 3, 6], 6)
        assert s.bits == 0b100101
        assert s.elements() == (1, 3, 6)
        assert len(s) == 3
        assert 3 in s and 2 not in s and 7 not in s
        assert str(s) == "{1,3,6}"

    def test_rejects_high_bits(self):
        with pytest.raises(InvalidInputError):
            SubsetMask(0b1000, 3)
        with pytest.raises(InvalidInputError):
            S([4], 3)
        with pytest.raises(InvalidInputError):
            SubsetMask(0, 65)

    def test_compress_expand_inverse(self):
        support = 0b1011010
        for v in range(1 << support.bit_count()):
            assert compress(expand(v, support), support) == v


class TestSetFamily:
    def test_canonical_order_and_dedup(self):
        fam = SetFamily(3, [[2, 3], [1], 0, 0b001])
        assert fam.bits == (0, 1, 6)
        assert len(fam) == 3
        assert [1] in fam and (2, 3) in fam and [3] not in fam

    def test_equality_and_hash(self):
        a = SetFamily.from_sets(3, [[1], [2]])
        b = SetFamily(3, [2, 1])
        assert a == b and hash(a) == hash(b)
        assert a != SetFamily(4, [1, 2])

    def test_mismatched_ground(self):
        with pytest.raises(InvalidInputError):
            SetFamily(3, [SubsetMask(1, 4)])
        with pytest.raises(InvalidInputError):
            trace(SetFamily(3, [1]), SubsetMask(1, 4))

    def test_level_is_lexicographic(self):
        got = [tuple(m.elements()) for m in map(lambda b: SubsetMask(int(b), 5), k_subsets(5, 2))]
        assert got == list(itertools.combinations(range(1, 6), 2))
        assert len(SetFamily.level(6, 3)) == 20


class TestTrace:
    def test_full_cube_projects_to_full_cube(self):
        assert trace(SetFamily.power_set(2), S([1], 2)) == SetFamily.power_set(1)

    def test_empty_projection(self):
        assert trace(SetFamily.from_sets(3, [[1, 2, 3]]), S([], 3)) == SetFamily(0, [0])

    def test_d3_family_on_first_triple(self, d3_family):
        x = S([1, 2, 3], 6)
        tr = trace(d3_family, x)
        expected = {frozenset(t) for t in oracles.traces(as_sets(d3_family), {1, 2, 3})}
        assert len(tr) == len(expected) == 7
        missing = oracles.missing_traces(as_sets(d3_family), {1, 2, 3})
        assert missing in ({frozenset()}, {frozenset({1, 2, 3})})


class TestShatter:
    def test_power_set(self):
        assert shatters(SetFamily.power_set(3), S([1, 2, 3], 3))

    def test_single_empty(self):
        assert not shatters(SetFamily(1, [0]), S([1], 1))

    def test_d3_family_never_fully_shatters_triples(self, d3_family):
        for c in itertools.combinations(range(1, 7), 3):
            x = S(c, 6)
            assert not shatters(d3_family, x)
            assert almost_shatters(d3_family, x)

    def test_full_shatter_is_not_almost(self):
        assert not almost_shatters(SetFamily.power_set(2), S([1, 2], 2))

    def test_d5_has_non_almost_shattered_set(self, d5_family):
        assert any(not almost_shatters(d5_family, S(c, 10)) for c in itertools.combinations(range(1, 11), 5))


class TestVC:
    def test_trivial(self):
        assert vc_dimension(SetFamily(4, [0])) == 0
        for n in range(6):
            assert vc_dimension(SetFamily.power_set(n)) == n

    def test_d3(self, d3_family):
        assert vc_dimension(d3_family) == oracles.vc_dimension(as_sets(d3_family), 6) == 2

    def test_empty_family_rejected(self):
        with pytest.raises(InvalidInputError):
            vc_dimension(SetFamily(3))

    def test_duplicated_columns(self):
        # 1 and 2 always together: shattering {1,2} is impossible.
        fam = SetFamily.from_sets(3, [[], [1, 2], [3], [1, 2, 3]])
        assert vc_dimension(fam) == 2
        assert not shatters(fam, S([1, 2], 3))


class TestShatteredSets:
    def test_singleton_empty(self):
        assert shattered_sets(SetFamily(1, [0])) == SetFamily(1, [0])

    def test_two_singletons(self):
        assert shattered_sets(SetFamily.from_sets(2, [[1], [2]])) == SetFamily.from_sets(2, [[], [1], [2]])

    def test_guard(self):
        with pytest.raises(ResourceLimitError):
            shattered_sets(SetFamily(25, [0]))


class TestSauer:
    @pytest.mark.parametrize("n,d,expected", [(6, 2, 22), (10, 1, 11), (5, 5, 32), (7, 7, 128)])
    def test_values(self, n, d, expected):
        assert sauer_bound(n, d) == expected

    def test_rejects_bad_args(self):
        with pytest.raises(InvalidInputError):
            sauer_bound(3, 4)


class TestMissingTraceIndex:
    def test_d3_every_set_missing_one_extreme(self, d3_family):
        idx = missing_trace_index(d3_family, 3)
        assert len(idx.subsets()) == 20
        for s, miss in idx.items():
            assert miss in ({SubsetMask(0, 6)}, {s})
            assert idx.almost_shattered(s)
            assert idx.present_count(s) + idx.missing_count(s) == 8

    def test_empty_family(self):
        idx = missing_trace_index(SetFamily(6), 3)
        assert all(idx.missing_count(s) == 8 for s in idx.subsets())

    def test_agrees_with_oracle_on_d4(self, d4_family):
        idx = missing_trace_index(d4_family, 4)
        sets = as_sets(d4_family)
        for s in idx.subsets():
            expect = oracles.missing_traces(sets, s.elements())
            assert {frozenset(m.elements()) for m in idx.missing(s)} == expect

    def test_d4_is_not_almost_shattering_yet_saturated(self, d4_family):
        # Some 4-set lacks two or more traces, yet no addition shatters anything new at size 4.
        idx = missing_trace_index(d4_family, 4)
        assert any(idx.missing_count(s) >= 2 for s in idx.subsets())
        outside = [b for b in range(256) if b not in d4_family]
        assert all(idx.newly_shattered(SubsetMask(b, 8)) is not None for b in outside)

    def test_newly_shattered_matches_oracle(self, d3_family):
        idx = missing_trace_index(d3_family, 3)
        sets = as_sets(d3_family)
        for b in range(64):
            a = SubsetMask(b, 6)
            got = idx.newly_shattered(a)
            fam_plus = sets | {frozenset(a.elements())}
            expect = next(
                (c for c in itertools.combinations(range(1, 7), 3)
                 if not oracles.shatters(sets, c) and oracles.shatters(fam_plus, c)),
                None,
            )
            assert (got.elements() if got else None) == expect

    def test_requires_middle_level(self, d3_family):
        with pytest.raises(InvalidInputError):
            missing_trace_index(d3_family, 2)
        with pytest.raises(InvalidInputError):
            missing_trace_index(d3_family, 3).missing(S([1, 2], 6))


def test_mask_array_roundtrip():
    fam = SetFamily(5, [3, 17, 30])
    assert fam.array.dtype == np.uint64
    assert list(fam.array) == [3, 17, 30]
    assert mask_of([1, 2]) == 3
