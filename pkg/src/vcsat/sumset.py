"""Restricted sumsets in Z_m and brute-force checks of the |Σ(A choose s)| > d bound."""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field

from .errors import InvalidInputError, ResourceLimitError
from .modular import ResidueSet

MAX_EXHAUSTIVE_D = 10


def restricted_sumset(a: ResidueSet, s: int) -> ResidueSet:
    """Residues of all sums of s distinct elements of ``a``, by direct enumeration."""
    if not 0 <= s <= len(a):
        raise InvalidInputError(f"s must be in [0, {len(a)}], got {s}")
    m = a.modulus
    return ResidueSet(m, frozenset(sum(c) % m for c in itertools.combinations(sorted(a.residues), s)))


def _exceeds(elements: tuple[int, ...], s: int, m: int, bound: int) -> bool:
    # Stops as soon as more than `bound` distinct sums have been seen.
    seen: set[int] = set()
    for c in itertools.combinations(elements, s):
        seen.add(sum(c) % m)
        if len(seen) > bound:
            return True
    return False


@dataclass
class SumsetCheck:
    d: int
    holds: bool
    checked: int
    witnesses: list[tuple[ResidueSet, int]] = field(default_factory=list)
    sampled: bool = False

    def __bool__(self) -> bool:
        return self.holds


def check_sumset_bound(d: int, *, samples: int | None = None, seed: int = 0) -> SumsetCheck:
    """Check |Σ(A choose s)| > d for every mixed-parity d-subset A of Z_2d and 2 <= s <= d-2.

    ``d <= 10`` runs exhaustively unless ``samples`` is given; larger d needs
    ``samples`` and then draws that many random A from a seeded generator.
    Single-parity sets fall outside the hypothesis and are skipped.
    """
    if d < 2:
        raise InvalidInputError(f"d must be at least 2, got {d}")
    m = 2 * d
    if samples is None:
        if d > MAX_EXHAUSTIVE_D:
            raise ResourceLimitError(f"exhaustive scan needs d <= {MAX_EXHAUSTIVE_D}; pass samples")
        pool = itertools.combinations(range(m), d)
    else:
        rng = random.Random(seed)
        pool = (tuple(sorted(rng.sample(range(m), d))) for _ in range(samples))
    result = SumsetCheck(d, True, 0, sampled=samples is not None)
    for a in pool:
        if len({v % 2 for v in a}) < 2:
            continue
        result.checked += 1
        for s in range(2, d - 1):
            if not _exceeds(a, s, m, d):
                result.holds = False
                result.witnesses.append((ResidueSet(m, frozenset(a)), s))
    return result


def sumset_size_cap(a: ResidueSet, s: int) -> int:
    return min(math.comb(len(a), s), a.modulus)
