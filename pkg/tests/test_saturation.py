import pytest

import oracles
from conftest import as_sets
from vcsat import (
    InvalidInputError,
    PreconditionError,
    ResourceLimitError,
    SetFamily,
    SubsetMask,
    duplicate_classes,
    extend_by_duplication,
    greedy_saturate,
    is_duplication_safe,
    is_saturated,
    min_saturated_size,
    reduced_family,
    vc_dimension,
)
from vcsat.saturation import candidate_order


class TestIsSaturated:
    def test_power_set(self):
        rep = is_saturated(SetFamily.power_set(3))
        assert rep.saturated and rep.vc == 3 and rep.counterexample is None

    def test_d3(self, d3_family):
        rep = is_saturated(d3_family)
        assert rep.saturated and rep.vc == 2
        a, s = rep.shattering_witness
        assert a not in d3_family
        assert oracles.shatters(as_sets(d3_family) | {frozenset(a.elements())}, s.elements())

    def test_d4(self, d4_family):
        rep = is_saturated(d4_family)
        assert rep.saturated and rep.vc == 3

    def test_counterexample_is_addable(self):
        fam = SetFamily.from_sets(3, [[], [1]])
        rep = is_saturated(fam)
        assert not rep.saturated
        a = frozenset(rep.counterexample.elements())
        assert oracles.vc_dimension(as_sets(fam) | {a}, 3) == rep.vc == 1

    def test_rejects_empty_and_large(self):
        with pytest.raises(InvalidInputError):
            is_saturated(SetFamily(3))
        with pytest.raises(ResourceLimitError):
            is_saturated(SetFamily(17, [0]))


class TestDuplicates:
    def test_two_columns_identical(self):
        fam = SetFamily.from_sets(3, [[1, 2], [1, 2, 3]])
        classes = duplicate_classes(fam)
        assert classes.classes == ((1, 2), (3,))
        assert classes.class_of(2) == (1, 2)
        assert not classes.reduced
        assert reduced_family(fam) == SetFamily.from_sets(2, [[1], [1, 2]])

    def test_d3_singletons(self, d3_family):
        classes = duplicate_classes(d3_family)
        assert classes.classes == tuple((i,) for i in range(1, 7))
        assert reduced_family(d3_family) == d3_family

    def test_single_full_member(self):
        assert duplicate_classes(SetFamily.from_sets(5, [[1, 2, 3, 4, 5]])).classes == ((1, 2, 3, 4, 5),)

    def test_blocks_match_oracle(self, d4_family):
        fam = extend_by_duplication(d4_family, 8, 11)
        assert list(duplicate_classes(fam).classes) == oracles.duplicate_blocks(as_sets(fam), 11)


class TestDuplication:
    def test_safety(self, d3_family):
        assert all(is_duplication_safe(d3_family, x) for x in range(1, 7))
        assert not is_duplication_safe(SetFamily.from_sets(1, [[], [1]]), 1)

    def test_extend_d3_to_7(self, d3_family):
        out = extend_by_duplication(d3_family, 1, 7)
        assert out.n == 7 and len(out) == 10
        for b in d3_family.bits:
            grown = b | (1 << 6) if b & 1 else b
            assert grown in out
        assert is_saturated(out).saturated

    def test_reduction_inverts_duplication(self, d3_family):
        assert reduced_family(extend_by_duplication(d3_family, 1, 8)) == d3_family

    def test_preconditions(self, d3_family):
        with pytest.raises(PreconditionError):
            extend_by_duplication(d3_family, 1, 6)
        with pytest.raises(PreconditionError):
            extend_by_duplication(SetFamily.from_sets(2, [[], [1]]), 1, 3)
        with pytest.raises(PreconditionError):
            extend_by_duplication(SetFamily.from_sets(3, [[1, 2], [1, 2, 3]]), 3, 4)
        with pytest.raises(InvalidInputError):
            extend_by_duplication(d3_family, 7, 8)


class TestGreedy:
    def test_fixed_point(self, d3_family):
        assert greedy_saturate(d3_family) == d3_family

    def test_empty_on_four_with_vc_zero(self):
        out = greedy_saturate(SetFamily(4), target_vc=0)
        assert len(out) >= 1
        rep = is_saturated(out)
        assert rep.saturated and rep.vc == 0

    def test_output_contains_input_and_is_saturated(self):
        fam = SetFamily.from_sets(5, [[1, 2], [3]])
        out = greedy_saturate(fam, target_vc=2)
        assert set(fam.bits) <= set(out.bits)
        rep = is_saturated(out)
        assert rep.saturated and rep.vc == 2
        assert oracles.is_saturated(as_sets(out), 5)

    def test_matches_restart_scan(self):
        # The single pass agrees with the naive "restart after each addition" loop.
        fam = SetFamily.from_sets(4, [[1], [2, 3]])
        naive = set(as_sets(fam))
        changed = True
        while changed:
            changed = False
            for b in candidate_order(4):
                a = frozenset(SubsetMask(int(b), 4).elements())
                if a not in naive and oracles.vc_dimension(naive | {a}, 4) <= 1:
                    naive.add(a)
                    changed = True
                    break
        assert as_sets(greedy_saturate(fam, target_vc=1)) == naive

    def test_rejects_overfull_input(self):
        with pytest.raises(PreconditionError):
            greedy_saturate(SetFamily.power_set(3), target_vc=1)

    def test_even6_completion(self, even6):
        base, out = even6
        assert set(base.bits) <= set(out.bits)
        assert 2 ** 6 <= len(out) <= 4 ** 6
        rep = is_saturated(out)
        assert rep.saturated and rep.vc == 5


class TestMinSaturatedSize:
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_vc_zero(self, n):
        assert min_saturated_size(n, 0) == 1

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_vc_one(self, n):
        assert min_saturated_size(n, 1) == n + 1

    def test_power_set_case(self):
        assert min_saturated_size(2, 2) == 4

    def test_guard(self):
        with pytest.raises(ResourceLimitError):
            min_saturated_size(5, 1)


def test_vc_preserved_by_extension(d4_family):
    assert vc_dimension(extend_by_duplication(d4_family, 8, 12)) == 3
