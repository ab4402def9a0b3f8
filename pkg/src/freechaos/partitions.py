"""Set partitions, non-crossing partitions, and the block classes behind diagram sums.

Ground sets are {1, ..., n}. Partitions are kept in canonical form: blocks
sorted by least element, elements ascending inside each block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

from .errors import GroundSetMismatchError, SizeLimitError

# Bell(12) ~ 4.2e6 and Catalan(16) ~ 3.5e7 already stretch exhaustive scans.
MAX_PARTITION_GROUND = 12
MAX_NC_GROUND = 16
MAX_RIORDAN_INDEX = 14


@dataclass(frozen=True)
class SetPartition:
    """A partition of {1, ..., n} in canonical block order."""

    n: int
    blocks: tuple[tuple[int, ...], ...]

    @classmethod
    def from_blocks(cls, n: int, blocks) -> SetPartition:
        """Canonicalize and validate an iterable of blocks."""
        canon = tuple(sorted((tuple(sorted(b)) for b in blocks), key=lambda b: b[0]))
        part = cls(n, canon)
        part.validate()
        return part

    def validate(self) -> None:
        if self.n < 1:
            raise GroundSetMismatchError(f"ground set must be nonempty, got n={self.n}")
        seen: set[int] = set()
        for b in self.blocks:
            if not b:
                raise GroundSetMismatchError("empty block")
            for x in b:
                if not 1 <= x <= self.n or x in seen:
                    raise GroundSetMismatchError(f"element {x} invalid for ground set [{self.n}]")
                seen.add(x)
        if len(seen) != self.n:
            raise GroundSetMismatchError(f"blocks cover {len(seen)} of {self.n} elements")

    def block_index(self) -> dict[int, int]:
        """Map each element to the index of its block."""
        out: dict[int, int] = {}
        for i, b in enumerate(self.blocks):
            for x in b:
                out[x] = i
        return out

    def block_sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    def to_lists(self) -> list[list[int]]:
        """JSON-friendly form: sorted list of sorted blocks."""
        return [list(b) for b in self.blocks]


def iter_partition_blocks(n: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Stream every partition of [n] as canonical block tuples.

    Elements are inserted one at a time, each joining an existing block or
    opening a singleton; the insertion order keeps blocks sorted by minimum.
    """
    if n < 1:
        raise SizeLimitError(f"n must be >= 1, got {n}")

    def rec(e: int, blocks: list[list[int]]) -> Iterator[tuple[tuple[int, ...], ...]]:
        if e > n:
            yield tuple(tuple(b) for b in blocks)
            return
        blocks.append([e])
        yield from rec(e + 1, blocks)
        blocks.pop()
        for i in range(len(blocks)):
            blocks[i].append(e)
            yield from rec(e + 1, blocks)
            blocks[i].pop()

    yield from rec(2, [[1]])


def enumerate_partitions(n: int) -> list[SetPartition]:
    """All partitions of [n]; exhaustive, so n is capped."""
    if not 1 <= n <= MAX_PARTITION_GROUND:
        raise SizeLimitError(f"enumerate_partitions needs 1 <= n <= {MAX_PARTITION_GROUND}, got {n}")
    return [SetPartition(n, blocks) for blocks in iter_partition_blocks(n)]


def _blocks_interleave(a: tuple[int, ...], b: tuple[int, ...]) -> bool:
    # a and b cross iff their merged order alternates source at least 3 times,
    # i.e. some p1 < q1 < p2 < q2 with p's in one block and q's in the other.
    merged = sorted([(x, 0) for x in a] + [(x, 1) for x in b])
    switches = sum(1 for i in range(1, len(merged)) if merged[i][1] != merged[i - 1][1])
    return switches >= 3


def is_noncrossing(p: SetPartition) -> bool:
    """Whether no two blocks interleave."""
    for i in range(len(p.blocks)):
        for j in range(i + 1, len(p.blocks)):
            if _blocks_interleave(p.blocks[i], p.blocks[j]):
                return False
    return True


@lru_cache(maxsize=4)
def _nc_blocks(n: int) -> tuple[tuple[tuple[int, ...], ...], ...]:
    """Non-crossing partitions of [n] by direct recursive insertion.

    Each state carries its staircase: the blocks that can still accept the
    next element without creating a crossing, ordered by descending maximum.
    Appending element e to staircase block s keeps s and everything below it
    addable and buries the blocks above it.
    """
    states: list[tuple[tuple[tuple[int, ...], ...], tuple[int, ...]]] = [(((1,),), (0,))]
    for e in range(2, n + 1):
        grown: list[tuple[tuple[tuple[int, ...], ...], tuple[int, ...]]] = []
        for blocks, stair in states:
            grown.append((blocks + ((e,),), (len(blocks),) + stair))
            for si, bi in enumerate(stair):
                nb = list(blocks)
                nb[bi] = nb[bi] + (e,)
                grown.append((tuple(nb), (bi,) + stair[si + 1:]))
        states = grown
    return tuple(blocks for blocks, _ in states)


def enumerate_nc(n: int) -> list[SetPartition]:
    """All non-crossing partitions of [n], Catalan(n) of them."""
    if not 1 <= n <= MAX_NC_GROUND:
        raise SizeLimitError(f"enumerate_nc needs 1 <= n <= {MAX_NC_GROUND}, got {n}")
    return [SetPartition(n, blocks) for blocks in _nc_blocks(n)]


def block_partition(m: int, q: int) -> SetPartition:
    """The partition of [mq] into m consecutive blocks of size q."""
    if m < 1 or q < 1:
        raise SizeLimitError(f"need m >= 1 and q >= 1, got m={m}, q={q}")
    blocks = tuple(tuple(range((j - 1) * q + 1, j * q + 1)) for j in range(1, m + 1))
    return SetPartition(m * q, blocks)


def meet_is_zero(sigma: SetPartition, pi: SetPartition) -> bool:
    """Whether the common refinement of sigma and pi is the singleton partition.

    Equivalent to: every block of sigma meets every block of pi in at most
    one element.
    """
    if sigma.n != pi.n:
        raise GroundSetMismatchError(f"ground sets differ: {sigma.n} vs {pi.n}")
    where = pi.block_index()
    for blk in sigma.blocks:
        hit: set[int] = set()
        for x in blk:
            i = where[x]
            if i in hit:
                return False
            hit.add(i)
    return True


@lru_cache(maxsize=None)
def nc0_classes(
    m: int, q: int
) -> tuple[tuple[SetPartition, ...], tuple[SetPartition, ...], tuple[SetPartition, ...]]:
    """Non-crossing partitions of [mq] whose meet with the block partition is zero,
    split by block size: (all blocks = 2, all blocks > 2, all blocks >= 2).

    Each class is filtered by its own predicate; the third is not assembled
    from the first two.
    """
    if m < 1 or q < 1:
        raise SizeLimitError(f"need m >= 1 and q >= 1, got m={m}, q={q}")
    if m * q > MAX_NC_GROUND:
        raise SizeLimitError(f"nc0_classes needs m*q <= {MAX_NC_GROUND}, got {m * q}")
    pi = block_partition(m, q)
    pairings: list[SetPartition] = []
    big: list[SetPartition] = []
    ge2: list[SetPartition] = []
    for blocks in _nc_blocks(m * q):
        sigma = SetPartition(m * q, blocks)
        if not meet_is_zero(sigma, pi):
            continue
        sizes = sigma.block_sizes()
        if all(s == 2 for s in sizes):
            pairings.append(sigma)
        if all(s > 2 for s in sizes):
            big.append(sigma)
        if all(s >= 2 for s in sizes):
            ge2.append(sigma)
    return tuple(pairings), tuple(big), tuple(ge2)


def intersection_split(
    m: int, q: int
) -> tuple[tuple[SetPartition, ...], tuple[SetPartition, ...]]:
    """Split the all-blocks->2 class by intersection sizes against the block partition.

    First list: every block of tau meets every base block in 0, (q+1)/2, or q
    elements. Second list: the rest. Only defined for odd q.
    """
    if q % 2 == 0:
        raise ValueError(f"intersection_split needs odd q, got {q}")
    _, big, _ = nc0_classes(m, q)
    pi = block_partition(m, q)
    allowed = {0, (q + 1) // 2, q}
    first: list[SetPartition] = []
    second: list[SetPartition] = []
    for tau in big:
        sets = [set(b) for b in tau.blocks]
        if all(len(s & set(pb)) in allowed for s in sets for pb in pi.blocks):
            first.append(tau)
        else:
            second.append(tau)
    return tuple(first), tuple(second)


@dataclass(frozen=True)
class RiordanTable:
    """Counts of no-singleton non-crossing partitions of [m] by block count."""

    m: int
    counts: tuple[tuple[int, int], ...]  # (block count j, number of partitions)

    def count(self, j: int) -> int:
        return dict(self.counts).get(j, 0)

    @property
    def total(self) -> int:
        return sum(c for _, c in self.counts)


@lru_cache(maxsize=None)
def riordan(m: int) -> RiordanTable:
    """Brute-force table of no-singleton NC partition counts, graded by blocks."""
    if not 1 <= m <= MAX_RIORDAN_INDEX:
        raise SizeLimitError(f"riordan needs 1 <= m <= {MAX_RIORDAN_INDEX}, got {m}")
    tally: dict[int, int] = {}
    for blocks in _nc_blocks(m):
        if any(len(b) == 1 for b in blocks):
            continue
        tally[len(blocks)] = tally.get(len(blocks), 0) + 1
    return RiordanTable(m, tuple(sorted(tally.items())))


def riordan_number(m: int) -> int:
    """Total count of no-singleton non-crossing partitions of [m]."""
    return riordan(m).total


def catalan(n: int) -> int:
    return math.comb(2 * n, n) // (n + 1)


@lru_cache(maxsize=None)
def bell(n: int) -> int:
    if n == 0:
        return 1
    return sum(math.comb(n - 1, k) * bell(k) for k in range(n))
