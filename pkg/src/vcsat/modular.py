"""Explicit constructions on [2d]: sum-mod-2d families, even-d split families, orbit families.

Residues live in {0, ..., 2d-1}; the ground-set element 2d therefore has
residue 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .errors import ConsistencyError, InvalidInputError, ResourceLimitError, UnsupportedError
from .family import MAX_N, SetFamily, _k_subset_masks, _k_subset_positions, bit, elements_of
from .saturation import (
    MAX_SATURATION_N,
    extend_by_duplication,
    greedy_saturate,
    is_duplication_safe,
    is_saturated,
)

MAX_MODULAR_D = 16
MAX_SEARCH_D = 12
MAX_EVEN_X_D = 20


@dataclass(frozen=True)
class ResidueSet:
    modulus: int
    residues: frozenset[int]

    def __post_init__(self):
        if self.modulus < 1:
            raise InvalidInputError(f"modulus must be positive, got {self.modulus}")
        object.__setattr__(self, "residues", frozenset(self.residues))
        bad = [r for r in self.residues if not 0 <= r < self.modulus]
        if bad:
            raise InvalidInputError(f"residues {sorted(bad)} outside [0, {self.modulus})")

    @classmethod
    def mod(cls, modulus: int, values: Iterable[int]) -> "ResidueSet":
        """Build from arbitrary integers, reducing each one."""
        return cls(modulus, frozenset(v % modulus for v in values))

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self.residues))

    def __len__(self) -> int:
        return len(self.residues)

    def __contains__(self, r: int) -> bool:
        return r in self.residues

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self)) + f"}} mod {self.modulus}"

    def reflect(self, c: int) -> "ResidueSet":
        """The set c - X."""
        return ResidueSet.mod(self.modulus, (c - r for r in self.residues))


@dataclass(frozen=True)
class ConditionReport:
    cond1: bool
    cond2: bool
    cond3: bool
    witness: int | None = None

    @property
    def all_pass(self) -> bool:
        return self.cond1 and self.cond2 and self.cond3


def _check_modulus(d: int, x: ResidueSet) -> None:
    if x.modulus != 2 * d:
        raise InvalidInputError(f"residue set is mod {x.modulus}, expected mod {2 * d}")


def _level_sums(d: int) -> tuple[np.ndarray, np.ndarray]:
    if not 2 <= d <= MAX_MODULAR_D:
        raise InvalidInputError(f"d must be in [2, {MAX_MODULAR_D}], got {d}")
    try:
        pos = _k_subset_positions(2 * d, d)
    except ResourceLimitError:
        raise ResourceLimitError(f"C({2 * d},{d}) middle-level sets is beyond the enumeration guard")
    masks = _k_subset_masks(2 * d, d)
    return masks, (pos.sum(axis=1) + d) % (2 * d)


def modular_family(d: int, x: ResidueSet) -> SetFamily:
    """All d-subsets of [2d] whose element sum lies in ``x`` mod 2d."""
    _check_modulus(d, x)
    masks, sums = _level_sums(d)
    keep = np.isin(sums, np.array(sorted(x.residues), dtype=np.int64))
    return SetFamily(2 * d, (int(m) for m in masks[keep]))


def _leave_one_out(d: int, residues: Iterable[int]) -> int | None:
    residues = sorted(residues)
    total = sum(residues)
    for u in residues:
        if (total - u) % d == 0:
            return u
    return None


def _both_parities(x: Iterable[int]) -> bool:
    parities = {r % 2 for r in x}
    return parities == {0, 1}


def check_odd_conditions(d: int, x: ResidueSet) -> ConditionReport:
    if d % 2 == 0:
        raise InvalidInputError(f"odd-d conditions need odd d, got {d}")
    _check_modulus(d, x)
    cond1 = len(x) == d and not (x.residues & x.reflect(d).residues)
    witness = _leave_one_out(d, x.residues)
    return ConditionReport(cond1, _both_parities(x), witness is None, witness)


def _check_even_input(d: int, x: ResidueSet) -> None:
    if d % 2 or d < 2:
        raise InvalidInputError(f"even-d construction needs even d, got {d}")
    _check_modulus(d, x)
    clash = x.residues & {d // 2, 3 * d // 2}
    if clash:
        raise InvalidInputError(f"residues {sorted(clash)} are reserved (d/2 and 3d/2)")


def check_even_conditions(d: int, x: ResidueSet, *, high_pivot: bool = False) -> ConditionReport:
    """Conditions for the split family; condition 3 runs on x ∪ {d/2} (or x ∪ {3d/2})."""
    _check_even_input(d, x)
    cond1 = len(x) == d - 1 and not (x.residues & x.reflect(d).residues)
    pivot = 3 * d // 2 if high_pivot else d // 2
    witness = _leave_one_out(d, x.residues | {pivot})
    return ConditionReport(cond1, _both_parities(x), witness is None, witness)


def even_families(d: int, x: ResidueSet) -> SetFamily:
    """F1(x) ∪ F2(x): d-sets through 2d with sum in x ∪ {d/2}, d-sets avoiding 2d with sum in x ∪ {3d/2}."""
    _check_even_input(d, x)
    masks, sums = _level_sums(d)
    top = np.uint64(bit(2 * d))
    has_top = (masks & top) != 0
    low = np.array(sorted(x.residues | {d // 2}), dtype=np.int64)
    high = np.array(sorted(x.residues | {3 * d // 2}), dtype=np.int64)
    keep = np.where(has_top, np.isin(sums, low), np.isin(sums, high))
    return SetFamily(2 * d, (int(m) for m in masks[keep]))


def explicit_X_odd(d: int) -> ResidueSet:
    if d % 2 == 0 or d < 3 or d == 5:
        raise UnsupportedError(f"no explicit odd construction for d={d} (d=5 is the built-in orbit family)")
    m = 2 * d
    if d % 4 == 3:
        k = (d - 1) // 2
        return ResidueSet.mod(m, [*range(1, k + 1), *range(2 * k + 1, 3 * k + 2)])
    r = (d - 1) // 4
    for t in range(1, 2 * r):
        a = [*range(1, 2 * r - t + 1), *range(2 * r + 1, 2 * r + t + 1)]
        x = ResidueSet.mod(m, [0, *a, *(d + v for v in a)])
        if check_odd_conditions(d, x).all_pass:
            return x
    raise UnsupportedError(f"no valid shift t found for d={d}")


def formula_X_even(d: int) -> ResidueSet:
    """{2d, d/2+1} ∪ [2, d/2-1] ∪ [d+1, 3d/2-1] taken literally.

    This set holds both d/2-1 and d/2+1, which sum to d, so it never passes
    condition 1; :func:`explicit_X_even` repairs it.
    """
    if d % 2 or d < 6:
        raise UnsupportedError(f"explicit even construction needs even d >= 6, got {d}")
    h = d // 2
    return ResidueSet.mod(2 * d, [2 * d, h + 1, *range(2, h), *range(d + 1, 3 * h)])


def explicit_X_even(d: int) -> ResidueSet:
    """A valid residue set for the split family, as close as possible to :func:`formula_X_even`.

    Among all transversals of v <-> d - v passing the three conditions, returns
    the one sharing the most residues with the literal formula; ties go to the
    lexicographically smallest residue tuple.
    """
    target = formula_X_even(d)
    if check_even_conditions(d, target).all_pass:
        return target
    if d > MAX_EVEN_X_D:
        raise ResourceLimitError(f"repairing the even residue set enumerates 2^(d-1) sets; need d <= {MAX_EVEN_X_D}")
    best = None
    best_key = None
    for x in _transversals(d):
        if not check_even_conditions(d, x).all_pass:
            continue
        key = (-len(x.residues & target.residues), tuple(x))
        if best_key is None or key < best_key:
            best, best_key = x, key
    if best is None:
        raise UnsupportedError(f"no residue set satisfies the even-d conditions for d={d}")
    return best


def _reflection_pairs(d: int, skip: set[int]) -> list[tuple[int, int]]:
    m = 2 * d
    pairs = []
    for v in range(m):
        w = (d - v) % m
        if v in skip or w in skip:
            continue
        if v < w:
            pairs.append((v, w))
    return pairs


def _transversals(d: int) -> Iterator[ResidueSet]:
    """All sets holding exactly one residue of each pair {v, d - v} (d/2, 3d/2 excluded for even d)."""
    skip = set() if d % 2 else {d // 2, 3 * d // 2}
    pairs = _reflection_pairs(d, skip)
    for choice in range(1 << len(pairs)):
        yield ResidueSet(2 * d, frozenset(p[choice >> i & 1] for i, p in enumerate(pairs)))


def find_valid_X(d: int) -> list[ResidueSet]:
    """Every residue set passing all conditions; condition 1 is built into the enumeration."""
    if d > MAX_SEARCH_D:
        raise ResourceLimitError(f"exhaustive X search needs d <= {MAX_SEARCH_D}, got {d}")
    if d < 2:
        raise InvalidInputError(f"d must be at least 2, got {d}")
    check = check_odd_conditions if d % 2 else check_even_conditions
    found = [x for x in _transversals(d) if check(d, x).all_pass]
    found.sort(key=lambda x: tuple(x))
    return found


def _rotate(mask: int, d: int) -> int:
    """Apply the cycle 1 -> 2 -> ... -> 2d-1 -> 1 (2d fixed) to a mask."""
    width = 2 * d - 1
    low_mask = (1 << width) - 1
    low = mask & low_mask
    low = ((low << 1) | (low >> (width - 1))) & low_mask
    return low | (mask & ~low_mask)


def cyclic_orbit_family(seed: SetFamily, d: int) -> SetFamily:
    if seed.n != 2 * d:
        raise InvalidInputError(f"seed must live on [{2 * d}], got [{seed.n}]")
    out = set()
    for b in seed.bits:
        for _ in range(2 * d - 1):
            b = _rotate(b, d)
            out.add(b)
    return SetFamily(2 * d, out)


F4_SEED = ((1, 2, 3, 4), (1, 2, 3, 5), (1, 2, 4, 5), (1, 2, 4, 8), (1, 3, 5, 8))
F5_SEED = (
    (1, 2, 3, 4, 5), (1, 2, 3, 4, 6), (1, 2, 3, 4, 8), (1, 2, 3, 5, 6), (1, 2, 3, 5, 7),
    (1, 2, 3, 5, 8), (1, 2, 3, 6, 8), (1, 2, 3, 6, 10), (1, 2, 4, 5, 8), (1, 2, 4, 5, 10),
    (1, 2, 5, 6, 10), (1, 2, 5, 7, 10), (1, 2, 5, 8, 10), (1, 3, 5, 7, 10),
)
D3_RESIDUES = (1, 3, 4)

BUILTINS = ("d3", "d4", "d5")


def builtin_family(name: str) -> SetFamily:
    if name == "d3":
        return modular_family(3, ResidueSet.mod(6, D3_RESIDUES))
    if name == "d4":
        return cyclic_orbit_family(SetFamily.from_sets(8, F4_SEED), 4)
    if name == "d5":
        return cyclic_orbit_family(SetFamily.from_sets(10, F5_SEED), 5)
    raise InvalidInputError(f"unknown built-in family {name!r}; choose from {BUILTINS}")


def has_pair_exactness(fam: SetFamily, d: int) -> bool:
    """Exactly one of each complementary pair of d-subsets of [2d] belongs to ``fam``."""
    full = (1 << (2 * d)) - 1
    return fam.sizes() <= {d} and all((full ^ b) not in fam for b in fam.bits) and \
        len(fam) == math.comb(2 * d, d) // 2


@dataclass(frozen=True)
class Construction:
    d: int
    family: SetFamily
    base: SetFamily
    duplicated: int | None
    # "exhaustive" when saturation was re-checked on [2d]; "conditions" when it rests on the residue conditions.
    verification: str


def construct(d: int, n: int) -> Construction:
    """Build a (d-1)-saturated family over [n] and record how it was checked."""
    if d < 3:
        raise InvalidInputError(f"construction needs d >= 3, got {d}")
    if not 2 * d <= n <= MAX_N:
        raise InvalidInputError(f"need 2d <= n <= {MAX_N}; got d={d}, n={n}")
    even = d % 2 == 0 and d >= 6
    if d in (3, 4, 5):
        base = builtin_family(f"d{d}")
        report = None
    elif even:
        if 2 * d > MAX_SATURATION_N:
            raise ResourceLimitError(f"even d={d} needs greedy completion on [{2 * d}], beyond n <= 16")
        base = greedy_saturate(even_families(d, explicit_X_even(d)))
        report = None
    else:
        x = explicit_X_odd(d)
        base = modular_family(d, x)
        report = check_odd_conditions(d, x)

    if 2 * d <= MAX_SATURATION_N:
        sat = is_saturated(base)
        if not sat.saturated or sat.vc != d - 1:
            raise ConsistencyError(f"base family for d={d} failed verification: {sat}")
        verification = "exhaustive"
    else:
        if not (report and report.all_pass and has_pair_exactness(base, d)):
            raise ConsistencyError(f"residue conditions failed for d={d}")
        verification = "conditions"
    if len(base) > 4 ** d or (d % 2 and len(base) != math.comb(2 * d, d) // 2):
        raise ConsistencyError(f"base family for d={d} has unexpected size {len(base)}")

    if n == 2 * d:
        return Construction(d, base, base, None, verification)
    if even:
        element = 2 * d
        if not is_duplication_safe(base, element):
            raise ConsistencyError(f"element {element} is not safe to duplicate")
    else:
        element = next((x for x in range(1, 2 * d + 1) if is_duplication_safe(base, x)), None)
        if element is None:
            raise ConsistencyError(f"no safe element to duplicate for d={d}")
    return Construction(d, extend_by_duplication(base, element, n), base, element, verification)


def build_saturated(d: int, n: int) -> SetFamily:
    return construct(d, n).family


def infer_residue_set(fam: SetFamily) -> ResidueSet | None:
    """Recover X when ``fam`` is exactly modular_family(d, X) (odd d) or even_families(d, X) (even d)."""
    if fam.n % 2 or fam.n < 4 or fam.sizes() - {fam.n // 2}:
        return None
    d = fam.n // 2
    m = 2 * d
    sums = {sum(elements_of(b)) % m for b in fam.bits}
    try:
        if d % 2:
            x = ResidueSet(m, frozenset(sums))
            return x if modular_family(d, x) == fam else None
        x = ResidueSet(m, frozenset(sums - {d // 2, 3 * d // 2}))
        return x if even_families(d, x) == fam else None
    except ResourceLimitError:
        return None
