"""Random one-per-complementary-pair families, their verification, and the Local Lemma inequality.

Sampling uses numpy's PCG64 bit generator seeded through ``SeedSequence``.
Raw PCG64 output is stable across platforms and numpy releases, and pair i
reads bit ``i % 64`` of raw word ``i // 64``, so the choice for a pair depends
only on (seed, pair index).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import mpmath
import numpy as np

from .errors import IndeterminateError, InvalidInputError
from .family import SetFamily, SubsetMask, TraceTable, _k_subset_masks

MAX_SAMPLE_D = 12
MAX_SEARCH_D = 6
MAX_LLL_D = 256
# Exponents above this use the bracket -2·c·2^-e <= c·ln(1 - 2^-e) <= 0.
EXACT_EXPONENT_LIMIT = 900
WORKERS_ENV = "VCSAT_WORKERS"


def _representatives(d: int) -> np.ndarray:
    # Lexicographic order lists every d-set containing 1 before any set that omits it.
    return _k_subset_masks(2 * d, d)[: math.comb(2 * d - 1, d - 1)]


@dataclass(frozen=True)
class PairFamilySample:
    d: int
    seed: int
    # choices[i] is True when the complement of representative i was taken.
    choices: np.ndarray

    def family(self) -> SetFamily:
        reps = _representatives(self.d)
        full = np.uint64((1 << (2 * self.d)) - 1)
        picked = np.where(self.choices, reps ^ full, reps)
        return SetFamily(2 * self.d, (int(m) for m in picked))


def _check_seed(seed: int) -> None:
    if not 0 <= seed < 1 << 64:
        raise InvalidInputError(f"seed must be a 64-bit unsigned integer, got {seed}")


def pair_choices(d: int, seed: int) -> PairFamilySample:
    if not 2 <= d <= MAX_SAMPLE_D:
        raise InvalidInputError(f"d must be in [2, {MAX_SAMPLE_D}], got {d}")
    _check_seed(seed)
    count = math.comb(2 * d - 1, d - 1)
    gen = np.random.PCG64(np.random.SeedSequence(seed))
    words = gen.random_raw((count + 63) // 64).astype(np.uint64)
    idx = np.arange(count)
    bits = (words[idx // 64] >> (idx % 64).astype(np.uint64)) & np.uint64(1)
    choices = bits.astype(bool)
    choices.setflags(write=False)
    return PairFamilySample(d, seed, choices)


def sample_pair_family(d: int, seed: int) -> SetFamily:
    return pair_choices(d, seed).family()


@dataclass(frozen=True)
class AlmostShatterReport:
    ok: bool
    checked: int
    failing: SubsetMask | None = None
    # Traces X missing from F|_S at the failing S: the realized events Q_{S,X}.
    missing: tuple[SubsetMask, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def verify_almost_shattering(
    fam: SetFamily, d: int, *, subsets: np.ndarray | None = None
) -> AlmostShatterReport:
    """Check that ``fam`` almost shatters every d-subset of [2d] (or only the given ``subsets``)."""
    if fam.n != 2 * d:
        raise InvalidInputError(f"family lives on [{fam.n}], expected [{2 * d}]")
    if fam.sizes() - {d}:
        raise InvalidInputError(f"family is not {d}-uniform")
    table = TraceTable(fam.array, fam.n, d, subsets)
    present = table.present
    counts = (~present).sum(axis=1)
    good = (counts == 1) & ~(present[:, 0] & present[:, -1])
    bad = np.flatnonzero(~good)
    if bad.size == 0:
        return AlmostShatterReport(True, len(present))
    row = int(bad[0])
    idx = np.flatnonzero(~present[row])
    missing = table.expand(np.full(len(idx), row), idx)
    return AlmostShatterReport(
        False,
        len(present),
        SubsetMask(int(table.subsets[row]), fam.n),
        tuple(SubsetMask(int(m), fam.n) for m in missing),
    )


def random_subsets(d: int, count: int, seed: int) -> np.ndarray:
    """``count`` distinct random d-subsets of [2d] (as masks), for spot checks."""
    _check_seed(seed)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    out: set[int] = set()
    total = math.comb(2 * d, d)
    count = min(count, total)
    while len(out) < count:
        picks = rng.permutation(2 * d)[:d]
        out.add(sum(1 << int(p) for p in picks))
    return np.array(sorted(out), dtype=np.uint64)


# ---------------------------------------------------------------------------
# Local Lemma inequality


@dataclass(frozen=True)
class LllEvaluation:
    d: int
    exponents: tuple[int, ...]
    counts: tuple[tuple[int, ...], ...]
    log_margin: float
    bracket: tuple[float, float]
    holds: bool

    def exponent(self, level: int) -> int:
        """e_l with p_l = 2^-e_l, for 1 <= l <= d-1."""
        return self.exponents[level - 1]

    def count(self, k: int, level: int) -> int:
        """d_{k,l}: how many events with a level-l trace one event of level k depends on."""
        return self.counts[k - 1][level - 1]


def level_exponent(d: int, level: int) -> int:
    return max(math.comb(d - 1, level), math.comb(d - 1, d - level))


def lll_evaluate(d: int) -> LllEvaluation:
    """Certified sign of Σ_l C(d,l)^2 ln(1 - 2^-e_l) + ln(2)/d.

    A nonnegative value means the product of (1 - p_l)^{C(d,l)^2} is at least
    2^{-1/d}.  Small exponents run in outward-rounded interval arithmetic at a
    precision where 1 - 2^-e is exact; large ones use a two-sided tail bound.
    """
    if not 2 <= d <= MAX_LLL_D:
        raise InvalidInputError(f"d must be in [2, {MAX_LLL_D}], got {d}")
    exps = tuple(level_exponent(d, l) for l in range(1, d))
    binoms = [math.comb(d, l) for l in range(d + 1)]
    counts = tuple(tuple(binoms[k] * binoms[l] ** 2 for l in range(1, d)) for k in range(1, d))
    iv = mpmath.iv
    saved = iv.prec
    iv.prec = EXACT_EXPONENT_LIMIT + 128
    try:
        total = iv.mpf(0)
        for level, e in enumerate(exps, start=1):
            weight = binoms[level] ** 2
            if e <= EXACT_EXPONENT_LIMIT:
                total += weight * iv.log(1 - iv.mpf(mpmath.ldexp(1, -e)))
            else:
                tail = mpmath.ldexp(mpmath.mpf(2 * weight), -e)
                total += iv.mpf([-tail, 0])
        total += iv.log(2) / d
        lo, hi = total.a, total.b
    finally:
        iv.prec = saved
    if lo >= 0:
        holds = True
    elif hi < 0:
        holds = False
    else:
        raise IndeterminateError(f"margin bracket [{lo}, {hi}] for d={d} contains 0")
    mid = (float(lo) + float(hi)) / 2
    return LllEvaluation(d, exps, counts, mid, (float(lo), float(hi)), holds)


# ---------------------------------------------------------------------------
# Monte Carlo


def trial_seed(seed: int, trial: int) -> int:
    return int(np.random.SeedSequence([seed, trial]).generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class MonteCarloReport:
    d: int
    trials: int
    seed: int
    successes: int
    first_success_trial: int | None
    first_success_seed: int | None

    @property
    def rate(self) -> float:
        return self.successes / self.trials if self.trials else 0.0


def _run_trials(d: int, seed: int, start: int, stop: int) -> list[int]:
    return [
        t for t in range(start, stop)
        if verify_almost_shattering(sample_pair_family(d, trial_seed(seed, t)), d).ok
    ]


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def monte_carlo_search(d: int, trials: int, seed: int, *, workers: int | None = None) -> MonteCarloReport:
    """Sample ``trials`` pair families and count those almost shattering every d-set.

    Trial t uses seed ``trial_seed(seed, t)``, so results do not depend on how
    trials are split across worker processes.
    """
    if not 2 <= d <= MAX_SEARCH_D:
        raise InvalidInputError(f"d must be in [2, {MAX_SEARCH_D}], got {d}")
    if trials < 0:
        raise InvalidInputError("trials must be non-negative")
    _check_seed(seed)
    workers = workers or worker_count()
    if workers <= 1 or trials < 2 * workers:
        hits = _run_trials(d, seed, 0, trials)
    else:
        bounds = np.linspace(0, trials, workers + 1).astype(int)
        with ProcessPoolExecutor(workers) as pool:
            parts = pool.map(_run_trials, [d] * workers, [seed] * workers, bounds[:-1], bounds[1:])
            hits = [t for part in parts for t in part]
    first = hits[0] if hits else None
    return MonteCarloReport(
        d, trials, seed, len(hits), first, trial_seed(seed, first) if first is not None else None
    )
