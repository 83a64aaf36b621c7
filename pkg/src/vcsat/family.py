"""Set families over [n] stored as integer bitmasks, plus traces, shattering and VC dimension.

Element ``i`` of the ground set occupies bit ``i - 1`` of a mask.  Families keep
their members sorted by numeric mask value, which gives a canonical order for
serialization and binary-search membership.
"""

from __future__ import annotations

import bisect
import itertools
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Union

import numpy as np

from .errors import InvalidInputError, ResourceLimitError

MAX_N = 64
MAX_SHATTERED_N = 24
# Upper bound on the number of k-subsets a single trace table may enumerate.
MAX_TABLE_SUBSETS = 4_000_000
# Rough cap on the number of matrix cells materialized per chunk.
_CHUNK_CELLS = 1 << 22


def bit(element: int) -> int:
    return 1 << (element - 1)


def mask_of(elements: Iterable[int]) -> int:
    m = 0
    for e in elements:
        m |= 1 << (e - 1)
    return m


def elements_of(mask: int) -> tuple[int, ...]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length())
        mask ^= low
    return tuple(out)


def compress(value: int, support: int) -> int:
    """Extract the bits of ``value`` at the positions set in ``support`` (a software pext)."""
    out = 0
    j = 0
    while support:
        low = support & -support
        if value & low:
            out |= 1 << j
        j += 1
        support ^= low
    return out


def expand(value: int, support: int) -> int:
    """Inverse of :func:`compress`: deposit the low bits of ``value`` onto ``support``."""
    out = 0
    j = 0
    while support:
        low = support & -support
        if value >> j & 1:
            out |= low
        j += 1
        support ^= low
    return out


@dataclass(frozen=True, order=True)
class SubsetMask:
    """A subset of [n] as a bit vector."""

    bits: int
    n: int

    def __post_init__(self):
        if not 0 <= self.n <= MAX_N:
            raise InvalidInputError(f"ground set size must be in [0, {MAX_N}], got {self.n}")
        if self.bits < 0 or self.bits >> self.n:
            raise InvalidInputError(f"mask {self.bits:#x} has bits outside [1, {self.n}]")

    @classmethod
    def of(cls, elements: Iterable[int], n: int) -> "SubsetMask":
        elements = list(elements)
        for e in elements:
            if not 1 <= e <= n:
                raise InvalidInputError(f"element {e} outside [1, {n}]")
        return cls(mask_of(elements), n)

    def elements(self) -> tuple[int, ...]:
        return elements_of(self.bits)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements())

    def __contains__(self, element: int) -> bool:
        return 1 <= element <= self.n and bool(self.bits >> (element - 1) & 1)

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self.elements())) + "}"


MemberLike = Union[int, SubsetMask, Iterable[int]]


def _as_mask(member: MemberLike, n: int) -> int:
    if isinstance(member, SubsetMask):
        if member.n != n:
            raise InvalidInputError(f"member over [{member.n}] in a family over [{n}]")
        return member.bits
    if isinstance(member, (int, np.integer)):
        m = int(member)
        if m < 0 or m >> n:
            raise InvalidInputError(f"mask {m:#x} has bits outside [1, {n}]")
        return m
    return SubsetMask.of(member, n).bits


class SetFamily:
    """A duplicate-free family of subsets of [n] in canonical (ascending mask) order.

    Members may be given as integer masks, :class:`SubsetMask` values, or
    iterables of elements.  Instances are immutable and hashable.
    """

    __slots__ = ("_n", "_bits", "__dict__")

    def __init__(self, n: int, members: Iterable[MemberLike] = ()):
        if not 0 <= n <= MAX_N:
            raise InvalidInputError(f"ground set size must be in [0, {MAX_N}], got {n}")
        self._n = n
        self._bits = tuple(sorted({_as_mask(m, n) for m in members}))

    @classmethod
    def from_sets(cls, n: int, sets: Iterable[Iterable[int]]) -> "SetFamily":
        return cls(n, (SubsetMask.of(s, n) for s in sets))

    @classmethod
    def power_set(cls, n: int) -> "SetFamily":
        return cls(n, range(1 << n))

    @classmethod
    def level(cls, n: int, k: int) -> "SetFamily":
        return cls(n, (int(m) for m in k_subsets(n, k)))

    @property
    def n(self) -> int:
        return self._n

    @property
    def bits(self) -> tuple[int, ...]:
        return self._bits

    @property
    def members(self) -> tuple[SubsetMask, ...]:
        return tuple(SubsetMask(b, self._n) for b in self._bits)

    @cached_property
    def array(self) -> np.ndarray:
        arr = np.array(self._bits, dtype=np.uint64)
        arr.setflags(write=False)
        return arr

    def __len__(self) -> int:
        return len(self._bits)

    def __iter__(self) -> Iterator[SubsetMask]:
        return iter(self.members)

    def __contains__(self, item) -> bool:
        try:
            m = _as_mask(item, self._n)
        except InvalidInputError:
            return False
        i = bisect.bisect_left(self._bits, m)
        return i < len(self._bits) and self._bits[i] == m

    def __eq__(self, other) -> bool:
        if not isinstance(other, SetFamily):
            return NotImplemented
        return self._n == other._n and self._bits == other._bits

    def __hash__(self) -> int:
        return hash((self._n, self._bits))

    def __repr__(self) -> str:
        shown = ", ".join(str(SubsetMask(b, self._n)) for b in self._bits[:6])
        more = ", ..." if len(self._bits) > 6 else ""
        return f"SetFamily(n={self._n}, size={len(self)}, [{shown}{more}])"

    def union(self, extra: Iterable[MemberLike]) -> "SetFamily":
        return SetFamily(self._n, itertools.chain(self._bits, extra))

    def sizes(self) -> set[int]:
        return {b.bit_count() for b in self._bits}


def _check_same_ground(fam: SetFamily, x: SubsetMask) -> None:
    if x.n != fam.n:
        raise InvalidInputError(f"subset over [{x.n}] used with a family over [{fam.n}]")


def is_intersecting(fam: SetFamily) -> bool:
    """No two members (and no member with itself, so no ∅) are disjoint."""
    if len(fam) == 0:
        return True
    arr = fam.array
    if fam.n <= MAX_SHATTERED_N:
        # below[S] = number of members contained in S; F meets everyone iff below[~F] == 0.
        below = np.zeros(1 << fam.n, dtype=np.int64)
        below[arr.astype(np.int64)] = 1
        for i in range(fam.n):
            view = below.reshape(-1, 2, 1 << i)
            view[:, 1, :] += view[:, 0, :]
        full = (1 << fam.n) - 1
        return not below[full ^ arr.astype(np.int64)].any()
    step = max(1, _CHUNK_CELLS // len(arr))
    for lo in range(0, len(arr), step):
        if ((arr[lo:lo + step, None] & arr[None, :]) == 0).any():
            return False
    return True


# ---------------------------------------------------------------------------
# k-subset enumeration


@lru_cache(maxsize=64)
def _k_subset_positions(n: int, k: int) -> np.ndarray:
    count = math.comb(n, k)
    if count > MAX_TABLE_SUBSETS:
        raise ResourceLimitError(f"C({n},{k}) = {count} subsets exceeds the enumeration guard")
    if k == 0:
        pos = np.zeros((1, 0), dtype=np.int64)
    else:
        pos = np.fromiter(
            itertools.chain.from_iterable(itertools.combinations(range(n), k)),
            dtype=np.int64,
            count=count * k,
        ).reshape(count, k)
    pos.setflags(write=False)
    return pos


@lru_cache(maxsize=64)
def _k_subset_masks(n: int, k: int) -> np.ndarray:
    pos = _k_subset_positions(n, k)
    masks = np.bitwise_or.reduce(
        np.left_shift(np.uint64(1), pos.astype(np.uint64)), axis=1, initial=np.uint64(0)
    ).astype(np.uint64)
    masks.setflags(write=False)
    return masks


def k_subsets(n: int, k: int) -> np.ndarray:
    """All k-subsets of [n] as uint64 masks, in lexicographic order of their element tuples."""
    if not 0 <= k <= n:
        return np.zeros(0, dtype=np.uint64)
    return _k_subset_masks(n, k)


def membership_matrix(masks: np.ndarray, n: int) -> np.ndarray:
    """Row i, column j is 1 iff element j+1 belongs to masks[i]."""
    shifts = np.arange(n, dtype=np.uint64)
    return ((masks[:, None] >> shifts[None, :]) & np.uint64(1)).astype(np.float64)


class TraceTable:
    """Which traces a family realizes on every k-subset of [n].

    ``present[s, t]`` is true iff trace ``t`` (the trace compressed onto subset
    ``s``, bit j = j-th smallest element) occurs.  The table is mutable through
    :meth:`add`; public wrappers never expose that.
    """

    def __init__(self, masks: np.ndarray, n: int, k: int, subsets: np.ndarray | None = None):
        self.n = n
        self.k = k
        if subsets is None:
            self.positions = _k_subset_positions(n, k)
            self.subsets = _k_subset_masks(n, k)
        else:
            self.subsets = np.asarray(subsets, dtype=np.uint64)
            self.positions = np.array(
                [[e - 1 for e in elements_of(int(m))] for m in self.subsets], dtype=np.int64
            ).reshape(len(self.subsets), k)
        num = len(self.subsets)
        weights = np.zeros((n, num), dtype=np.float64)
        if k:
            cols = np.repeat(np.arange(num), k)
            weights[self.positions.ravel(), cols] = np.tile(2.0 ** np.arange(k), num)
        self.weights = weights
        self.present = np.zeros((num, 1 << k), dtype=bool)
        self._fill(np.asarray(masks, dtype=np.uint64))

    def _fill(self, masks: np.ndarray) -> None:
        if len(masks) == 0:
            return
        num = len(self.subsets)
        width = 1 << self.k
        step = max(1, _CHUNK_CELLS // max(num, 1))
        flat = self.present.reshape(-1)
        base = np.arange(num, dtype=np.int64) * width
        for lo in range(0, len(masks), step):
            idx = self.compressed(masks[lo:lo + step])
            flat[(idx + base[None, :]).ravel()] = True

    def compressed(self, masks: np.ndarray) -> np.ndarray:
        """Compressed trace index of each mask on each subset, shape (len(masks), #subsets)."""
        mem = membership_matrix(np.asarray(masks, dtype=np.uint64), self.n)
        return (mem @ self.weights).astype(np.int64)

    def add(self, mask: int) -> np.ndarray:
        """Record one more member; returns the rows whose missing count dropped."""
        idx = self.compressed(np.array([mask], dtype=np.uint64))[0]
        rows = np.arange(len(self.subsets))
        fresh = ~self.present[rows, idx]
        self.present[rows, idx] = True
        return rows[fresh]

    def missing_counts(self) -> np.ndarray:
        return (1 << self.k) - self.present.sum(axis=1)

    def full_rows(self) -> np.ndarray:
        return np.flatnonzero(self.present.all(axis=1))

    def expand(self, rows: np.ndarray, idx: np.ndarray) -> np.ndarray:
        """Turn compressed trace indices on the given rows back into ambient masks."""
        out = np.zeros(len(rows), dtype=np.uint64)
        idx = np.asarray(idx, dtype=np.uint64)
        for j in range(self.k):
            take = (idx >> np.uint64(j)) & np.uint64(1)
            out |= take << self.positions[rows, j].astype(np.uint64)
        return out

    def single_missing(self, rows: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Rows with exactly one absent trace, and that trace as an ambient mask."""
        if rows is None:
            rows = np.arange(len(self.subsets))
        sub = ~self.present[rows]
        rows = rows[sub.sum(axis=1) == 1]
        idx = np.argmax(~self.present[rows], axis=1)
        return rows, self.expand(rows, idx)


def first_hits(candidates: np.ndarray, supports: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """For each candidate A, the first j with ``A & supports[j] == targets[j]``, else -1."""
    candidates = np.asarray(candidates, dtype=np.uint64)
    out = np.full(len(candidates), -1, dtype=np.int64)
    if len(supports) == 0 or len(candidates) == 0:
        return out
    step = max(1, _CHUNK_CELLS // len(supports))
    for lo in range(0, len(candidates), step):
        block = candidates[lo:lo + step]
        match = (block[:, None] & supports[None, :]) == targets[None, :]
        hit = match.any(axis=1)
        out[lo:lo + step][hit] = np.argmax(match[hit], axis=1)
    return out


# ---------------------------------------------------------------------------
# Public operations


def trace(fam: SetFamily, x: SubsetMask) -> SetFamily:
    """Projection of ``fam`` onto ``x``, re-indexed to a family over [|x|]."""
    _check_same_ground(fam, x)
    return SetFamily(len(x), {compress(b, x.bits) for b in fam.bits})


def shatters(fam: SetFamily, x: SubsetMask) -> bool:
    _check_same_ground(fam, x)
    return len({b & x.bits for b in fam.bits}) == 1 << len(x)


def almost_shatters(fam: SetFamily, x: SubsetMask) -> bool:
    _check_same_ground(fam, x)
    seen = {b & x.bits for b in fam.bits}
    if len(seen) != (1 << len(x)) - 1:
        return False
    return 0 not in seen or x.bits not in seen


def transversal(fam: SetFamily) -> int:
    """Mask keeping the smallest element of every duplicate class."""
    seen: set[tuple[bool, ...]] = set()
    keep = 0
    for e in range(1, fam.n + 1):
        col = tuple(bool(b >> (e - 1) & 1) for b in fam.bits)
        if col not in seen:
            seen.add(col)
            keep |= bit(e)
    return keep


def vc_dimension(fam: SetFamily) -> int:
    """Size of the largest shattered set.

    Duplicate elements never sit together in a shattered set, so the scan runs
    on the reduced family.  Sizes are tried in ascending order and the scan
    stops at the first size with no shattered set (shattering is downward
    closed).
    """
    if len(fam) == 0:
        raise InvalidInputError("VC dimension of the empty family is undefined")
    keep = transversal(fam)
    n = keep.bit_count()
    masks = np.array(sorted({compress(b, keep) for b in fam.bits}), dtype=np.uint64)
    vc = 0
    for k in range(1, n + 1):
        if len(masks) < 1 << k:
            break
        if len(TraceTable(masks, n, k).full_rows()) == 0:
            break
        vc = k
    return vc


def shattered_sets(fam: SetFamily) -> SetFamily:
    """The family Sh(fam) of all sets shattered by ``fam``."""
    if fam.n > MAX_SHATTERED_N:
        raise ResourceLimitError(f"shattered_sets needs n <= {MAX_SHATTERED_N}, got {fam.n}")
    out: list[int] = []
    if len(fam) == 0:
        return SetFamily(fam.n)
    for k in range(fam.n + 1):
        if len(fam) < 1 << k:
            break
        table = TraceTable(fam.array, fam.n, k)
        rows = table.full_rows()
        if len(rows) == 0:
            break
        out.extend(int(m) for m in table.subsets[rows])
    return SetFamily(fam.n, out)


def sauer_bound(n: int, d: int) -> int:
    if not 0 <= d <= n <= MAX_N:
        raise InvalidInputError(f"need 0 <= d <= n <= {MAX_N}, got n={n}, d={d}")
    return sum(math.comb(n, i) for i in range(d + 1))


class MissingTraceIndex:
    """For every d-subset S of [2d], the traces T ⊆ S absent from F|_S.

    Traces are reported as subsets of S in the coordinates of the ambient
    ground set, so ``missing(S) == {frozenset(∅)}`` style checks read directly.
    """

    def __init__(self, table: TraceTable):
        self._table = table

    @property
    def d(self) -> int:
        return self._table.k

    @property
    def n(self) -> int:
        return self._table.n

    @cached_property
    def _row_of(self) -> dict[int, int]:
        return {int(m): i for i, m in enumerate(self._table.subsets)}

    def subsets(self) -> tuple[SubsetMask, ...]:
        return tuple(SubsetMask(int(m), self.n) for m in self._table.subsets)

    def _row(self, s: SubsetMask | int) -> int:
        key = s.bits if isinstance(s, SubsetMask) else int(s)
        try:
            return self._row_of[key]
        except KeyError:
            raise InvalidInputError(f"{s} is not a {self.d}-subset of [{self.n}]") from None

    def missing(self, s: SubsetMask | int) -> frozenset[SubsetMask]:
        row = self._row(s)
        idx = np.flatnonzero(~self._table.present[row])
        rows = np.full(len(idx), row)
        return frozenset(SubsetMask(int(m), self.n) for m in self._table.expand(rows, idx))

    def missing_count(self, s: SubsetMask | int) -> int:
        return int((~self._table.present[self._row(s)]).sum())

    def present_count(self, s: SubsetMask | int) -> int:
        return int(self._table.present[self._row(s)].sum())

    @cached_property
    def entries(self) -> dict[SubsetMask, frozenset[SubsetMask]]:
        return {s: self.missing(s) for s in self.subsets()}

    def items(self):
        return self.entries.items()

    def almost_shattered(self, s: SubsetMask | int) -> bool:
        miss = self.missing(s)
        key = s.bits if isinstance(s, SubsetMask) else int(s)
        return miss == {SubsetMask(0, self.n)} or miss == {SubsetMask(key, self.n)}

    def newly_shattered(self, a: SubsetMask) -> SubsetMask | None:
        """First S (lexicographic) that adding ``a`` would shatter, i.e. missing(S) = {a ∩ S}."""
        rows, targets = self._table.single_missing()
        hit = first_hits(np.array([a.bits], dtype=np.uint64), self._table.subsets[rows], targets)[0]
        if hit < 0:
            return None
        return SubsetMask(int(self._table.subsets[rows[hit]]), self.n)


def missing_trace_index(fam: SetFamily, d: int) -> MissingTraceIndex:
    if fam.n != 2 * d:
        raise InvalidInputError(f"missing-trace index needs n = 2d; got n={fam.n}, d={d}")
    return MissingTraceIndex(TraceTable(fam.array, fam.n, d))
