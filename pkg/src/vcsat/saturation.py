"""Saturation checks, duplicate-class reduction, duplication, greedy completion.

A family F is saturated when every set outside F raises the VC dimension once
added.  Adding one set A contributes at most one new trace on each S, so A
raises vc(F) = v exactly when some (v+1)-set S misses only the trace A ∩ S.
All checks here run off that criterion.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidInputError, PreconditionError, ResourceLimitError
from .family import (
    MAX_N,
    SetFamily,
    SubsetMask,
    TraceTable,
    bit,
    compress,
    first_hits,
    transversal,
    vc_dimension,
)

MAX_SATURATION_N = 16
MAX_ORACLE_N = 4
_GREEDY_CHUNK = 4096


@dataclass(frozen=True)
class DuplicateClasses:
    n: int
    classes: tuple[tuple[int, ...], ...]

    def class_of(self, x: int) -> tuple[int, ...]:
        for block in self.classes:
            if x in block:
                return block
        raise InvalidInputError(f"element {x} outside [1, {self.n}]")

    @property
    def reduced(self) -> bool:
        return all(len(block) == 1 for block in self.classes)


@dataclass(frozen=True)
class SaturationReport:
    saturated: bool
    vc: int
    counterexample: SubsetMask | None = None
    # For a saturated family: the first candidate A and a set S it would shatter.
    shattering_witness: tuple[SubsetMask, SubsetMask] | None = None


@lru_cache(maxsize=32)
def candidate_order(n: int) -> np.ndarray:
    """All subsets of [n] ordered by (size, mask value)."""
    arr = np.arange(1 << n, dtype=np.uint64)
    order = np.lexsort((arr, np.bitwise_count(arr)))
    out = arr[order]
    out.setflags(write=False)
    return out


def _outside(fam: SetFamily) -> np.ndarray:
    cands = candidate_order(fam.n)
    return cands[~np.isin(cands, fam.array)]


def _check_size(fam: SetFamily) -> None:
    if fam.n > MAX_SATURATION_N:
        raise ResourceLimitError(
            f"saturation checks enumerate 2^n candidates; need n <= {MAX_SATURATION_N}, got {fam.n}"
        )


def is_saturated(fam: SetFamily) -> SaturationReport:
    _check_size(fam)
    if len(fam) == 0:
        raise InvalidInputError("saturation of the empty family is undefined")
    vc = vc_dimension(fam)
    cands = _outside(fam)
    if len(cands) == 0:
        return SaturationReport(True, vc)
    table = TraceTable(fam.array, fam.n, vc + 1)
    rows, targets = table.single_missing()
    supports = table.subsets[rows]
    hits = first_hits(cands, supports, targets)
    free = np.flatnonzero(hits < 0)
    if free.size:
        return SaturationReport(False, vc, counterexample=SubsetMask(int(cands[free[0]]), fam.n))
    witness = (SubsetMask(int(cands[0]), fam.n), SubsetMask(int(supports[hits[0]]), fam.n))
    return SaturationReport(True, vc, shattering_witness=witness)


def duplicate_classes(fam: SetFamily) -> DuplicateClasses:
    blocks: dict[tuple[bool, ...], list[int]] = {}
    for e in range(1, fam.n + 1):
        col = tuple(bool(b >> (e - 1) & 1) for b in fam.bits)
        blocks.setdefault(col, []).append(e)
    classes = sorted(tuple(v) for v in blocks.values())
    return DuplicateClasses(fam.n, tuple(classes))


def reduced_family(fam: SetFamily) -> SetFamily:
    """Projection onto the smallest element of each duplicate class, relabeled 1..|W|."""
    keep = transversal(fam)
    return SetFamily(keep.bit_count(), (compress(b, keep) for b in fam.bits))


def _check_element(fam: SetFamily, x: int) -> None:
    if not 1 <= x <= fam.n:
        raise InvalidInputError(f"element {x} outside [1, {fam.n}]")


def is_duplication_safe(fam: SetFamily, x: int) -> bool:
    """True iff flipping x in any member never lands on another member."""
    _check_element(fam, x)
    flip = bit(x)
    return all((b ^ flip) not in fam for b in fam.bits)


def extend_by_duplication(fam: SetFamily, x: int, n2: int) -> SetFamily:
    """Add elements n+1..n2 as copies of x."""
    _check_element(fam, x)
    if n2 <= fam.n:
        raise PreconditionError(f"target ground set {n2} must exceed {fam.n}")
    if n2 > MAX_N:
        raise InvalidInputError(f"ground set capped at {MAX_N}")
    if not duplicate_classes(fam).reduced:
        raise PreconditionError("family has duplicate elements; reduce it first")
    if not is_duplication_safe(fam, x):
        raise PreconditionError(f"element {x} is not safe to duplicate")
    fresh = ((1 << n2) - 1) ^ ((1 << fam.n) - 1)
    flag = bit(x)
    return SetFamily(n2, (b | fresh if b & flag else b for b in fam.bits))


def greedy_saturate(fam: SetFamily, target_vc: int | None = None) -> SetFamily:
    """Complete ``fam`` to a saturated family of VC dimension ``target_vc``.

    Candidates are scanned once in (size, mask) order and each one whose
    addition keeps the dimension is added.  Blocking is monotone (a set that
    would shatter something keeps doing so as the family grows), so a single
    pass gives the same result as restarting the scan after every addition.
    """
    _check_size(fam)
    if target_vc is None:
        target_vc = vc_dimension(fam)
    if target_vc < 0:
        raise InvalidInputError("target VC dimension must be non-negative")
    n = fam.n
    if target_vc >= n:
        return SetFamily.power_set(n)
    table = TraceTable(fam.array, n, target_vc + 1)
    if len(table.full_rows()):
        raise PreconditionError(f"input already has VC dimension above {target_vc}")
    rows, targets = table.single_missing()
    supports = table.subsets[rows]
    cands = _outside(fam)
    added: list[int] = []
    for lo in range(0, len(cands), _GREEDY_CHUNK):
        chunk = cands[lo:lo + _GREEDY_CHUNK]
        blocked = first_hits(chunk, supports, targets) >= 0
        i = 0
        while True:
            free = np.flatnonzero(~blocked[i:])
            if free.size == 0:
                break
            j = i + int(free[0])
            a = int(chunk[j])
            added.append(a)
            changed = table.add(a)
            new_rows, new_targets = table.single_missing(changed)
            if new_rows.size:
                new_supports = table.subsets[new_rows]
                supports = np.concatenate([supports, new_supports])
                targets = np.concatenate([targets, new_targets])
                blocked[j + 1:] |= first_hits(chunk[j + 1:], new_supports, new_targets) >= 0
            i = j + 1
    return fam.union(added)


def _tiny_vc(fam: tuple[int, ...], subsets_by_size: list[list[int]]) -> int:
    vc = -1
    for k, level in enumerate(subsets_by_size):
        if not any(len({f & s for f in fam}) == 1 << k for s in level):
            break
        vc = k
    return vc


def min_saturated_size(n: int, d: int) -> int:
    """Exhaustive sat_VC(n, d): the smallest saturated family over [n] with VC dimension d.

    Families are visited as k-subsets of 2^[n] for k = 1, 2, ...; the first k
    holding a witness is returned.  Each check is the plain definition.
    """
    if n > MAX_ORACLE_N:
        raise ResourceLimitError(f"exhaustive search over 2^(2^n) families needs n <= {MAX_ORACLE_N}")
    if not 0 <= d <= n:
        raise InvalidInputError(f"need 0 <= d <= n, got n={n}, d={d}")
    universe = list(range(1 << n))
    by_size = [[s for s in universe if s.bit_count() == k] for k in range(n + 1)]
    top = by_size[d + 1] if d < n else []
    full = 1 << (d + 1)
    for k in range(1, len(universe) + 1):
        for fam in itertools.combinations(universe, k):
            if _tiny_vc(fam, by_size) != d:
                continue
            members = set(fam)
            traces = [{f & s for f in fam} for s in top]
            if all(
                any(len(tr) == full - 1 and (a & s) not in tr for s, tr in zip(top, traces))
                for a in universe
                if a not in members
            ):
                return k
    raise AssertionError("the power set is always saturated")
