"""Exact pair-partition combinatorics.

This module enumerates and counts the partition classes indexing the
limiting covariance formulas:

* ``P2(2k)``      -- all pair partitions of {1..2k};
* ``P2(p,q)``     -- pair partitions of {1..p+q} with at least one block
                     straddling the split after position p (a "cross");
* ``P2~(p,q)``    -- those with at least three crosses;
* ``P24(p,q)``    -- partitions with exactly one 4-element block taking
                     two elements from each side, all other blocks being
                     same-side pairs.

Closed-form counts (``r1`` .. ``r4``, ``card_p2tilde_even``) are exact
integers; the enumerations are the independent oracle for them.
Everything here is pure and deterministic: partitions are emitted with
each block sorted ascending and blocks ordered by smallest element.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterator
from dataclasses import dataclass, field

import numpy as np

from .caps import WorkCapExceeded, partition_cap


def double_factorial(m: int) -> int:
    """m!! = m (m-2) (m-4) ... with (-1)!! = 0!! = 1.

    Rejects m < -1.
    """
    if m < -1:
        raise ValueError(f"double factorial undefined for m={m}")
    result = 1
    while m > 1:
        result *= m
        m -= 2
    return result


@dataclass(frozen=True)
class PairPartition:
    """A pairing of {1..2k} into k unordered two-element blocks.

    ``blocks`` is canonical: each block is an ascending pair and blocks
    are sorted by their smaller element.
    """

    blocks: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        seen: set[int] = set()
        for block in self.blocks:
            if len(block) != 2 or block[0] >= block[1]:
                raise ValueError(f"blocks must be ascending pairs, got {block}")
            seen.update(block)
        n = 2 * len(self.blocks)
        if seen != set(range(1, n + 1)):
            raise ValueError("blocks must partition {1..2k} exactly")
        if list(self.blocks) != sorted(self.blocks):
            raise ValueError("blocks must be sorted by smallest element")

    @property
    def k(self) -> int:
        return len(self.blocks)

    @property
    def n(self) -> int:
        return 2 * len(self.blocks)

    @classmethod
    def from_blocks(cls, blocks) -> "PairPartition":
        """Canonicalize arbitrary block order/orientation."""
        canon = tuple(sorted(tuple(sorted(b)) for b in blocks))
        return cls(canon)

    def block_of(self, i: int) -> int:
        """0-based index of the block containing element i."""
        for idx, (a, b) in enumerate(self.blocks):
            if i == a or i == b:
                return idx
        raise ValueError(f"element {i} not in partition of [{self.n}]")


@dataclass(frozen=True)
class MixedPartition24:
    """Partition of {1..p+q} with one 4-element block straddling 2+2.

    All other blocks are two-element and lie entirely on one side of the
    split after position p.
    """

    pair_blocks: tuple[tuple[int, int], ...]
    quad_block: tuple[int, int, int, int]
    p: int
    q: int

    def __post_init__(self) -> None:
        if len(self.quad_block) != 4 or list(self.quad_block) != sorted(self.quad_block):
            raise ValueError("quad block must be 4 ascending elements")
        left = sum(1 for i in self.quad_block if i <= self.p)
        if left != 2:
            raise ValueError("quad block must take exactly 2 elements from each side")
        seen = set(self.quad_block)
        for a, b in self.pair_blocks:
            if a >= b:
                raise ValueError("pair blocks must be ascending")
            if (a <= self.p) != (b <= self.p):
                raise ValueError("pair blocks may not straddle the split")
            seen.update((a, b))
        if seen != set(range(1, self.p + self.q + 1)) or len(seen) != self.p + self.q:
            raise ValueError("blocks must partition {1..p+q}")
        if list(self.pair_blocks) != sorted(self.pair_blocks):
            raise ValueError("pair blocks must be sorted by smallest element")

    @property
    def n(self) -> int:
        return self.p + self.q


@dataclass(frozen=True)
class PartitionClassQuery:
    """Selects pair partitions of {1..p+q} with >= min_crosses crosses."""

    p: int
    q: int
    min_crosses: int = 1

    def __post_init__(self) -> None:
        if self.p < 2 or self.q < 2:
            raise ValueError("p and q must be at least 2")
        if self.min_crosses < 0:
            raise ValueError("min_crosses must be non-negative")


def _pairings(elems: tuple[int, ...]) -> Iterator[tuple[tuple[int, int], ...]]:
    """All pairings of *elems*, blocks emitted smallest-first."""
    if not elems:
        yield ()
        return
    first, rest = elems[0], elems[1:]
    for i, partner in enumerate(rest):
        head = (first, partner)
        for tail in _pairings(rest[:i] + rest[i + 1:]):
            yield (head,) + tail


def enumerate_pair_partitions(k: int) -> list[PairPartition]:
    """All (2k-1)!! pair partitions of {1..2k} in canonical order."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    count = double_factorial(2 * k - 1)
    if count > partition_cap():
        raise WorkCapExceeded(
            f"enumerating P2({2 * k}) would emit {count} partitions "
            f"(cap {partition_cap()})"
        )
    # _pairings already yields blocks sorted by smallest element.
    return [PairPartition(blocks) for blocks in _pairings(tuple(range(1, 2 * k + 1)))]


def count_crosses(pi: PairPartition, p: int) -> int:
    """Number of blocks with one element <= p and one element > p."""
    if not 1 <= p <= pi.n - 1:
        raise ValueError(f"split position p={p} outside 1..{pi.n - 1}")
    return sum(1 for a, b in pi.blocks if a <= p < b)


def enumerate_class(query: PartitionClassQuery) -> list[PairPartition]:
    """Pair partitions of {1..p+q} with at least ``min_crosses`` crosses.

    Empty when p+q is odd (no pairing exists).
    """
    p, q = query.p, query.q
    if (p + q) % 2 == 1:
        return []
    k = (p + q) // 2
    return [
        pi for pi in enumerate_pair_partitions(k)
        if count_crosses(pi, p) >= query.min_crosses
    ]


def cross_histogram(p: int, q: int) -> dict[int, int]:
    """Number of pair partitions of {1..p+q} by exact cross count."""
    if (p + q) % 2 == 1:
        return {}
    hist: dict[int, int] = {}
    for pi in enumerate_pair_partitions((p + q) // 2):
        c = count_crosses(pi, p)
        hist[c] = hist.get(c, 0) + 1
    return hist


def enumerate_p24(p: int, q: int) -> list[MixedPartition24]:
    """All mixed partitions with one 2+2 straddling quad block.

    Empty when p or q is odd.
    """
    if p < 2 or q < 2:
        raise ValueError("p and q must be at least 2")
    if p % 2 or q % 2:
        return []
    expected = r2(p, q)
    if expected > partition_cap():
        raise WorkCapExceeded(
            f"enumerating P24({p},{q}) would emit {expected} partitions"
        )
    left = tuple(range(1, p + 1))
    right = tuple(range(p + 1, p + q + 1))
    out: list[MixedPartition24] = []
    for quad_l in itertools.combinations(left, 2):
        rest_l = tuple(x for x in left if x not in quad_l)
        for quad_r in itertools.combinations(right, 2):
            rest_r = tuple(x for x in right if x not in quad_r)
            quad = quad_l + quad_r
            for blocks_l in _pairings(rest_l):
                for blocks_r in _pairings(rest_r):
                    pairs = tuple(sorted(blocks_l + blocks_r))
                    out.append(MixedPartition24(pairs, quad, p, q))
    return out


def r1(p: int, q: int, k: int) -> int:
    """C(p,k) C(q,k) k! (p-k-1)!! (q-k-1)!!.

    Counts the pair partitions of {1..p+q} with exactly k crosses.
    Returns 0 for parity-infeasible or out-of-range k so callers can sum
    over any index set.
    """
    if p < 1 or q < 1:
        raise ValueError("p and q must be positive")
    if k < 0 or k > min(p, q) or (p - k) % 2 or (q - k) % 2:
        return 0
    return (
        math.comb(p, k) * math.comb(q, k) * math.factorial(k)
        * double_factorial(p - k - 1) * double_factorial(q - k - 1)
    )


def r2(p: int, q: int) -> int:
    """p q / 4 * (p-1)!! (q-1)!! = |P24(p,q)| for even p, q >= 2."""
    if p % 2 or q % 2:
        raise ValueError(f"r2 requires even p, q; got ({p}, {q})")
    if p < 2 or q < 2:
        raise ValueError("p and q must be at least 2")
    return p * q // 4 * double_factorial(p - 1) * double_factorial(q - 1)


def r3(p: int, r: int) -> int:
    """(p+r-1)!! - (p-1)!! (r-1)!! for even p, r >= 2."""
    if p % 2 or r % 2:
        raise ValueError(f"r3 requires even p, r; got ({p}, {r})")
    if p < 2 or r < 2:
        raise ValueError("p and r must be at least 2")
    return double_factorial(p + r - 1) - double_factorial(p - 1) * double_factorial(r - 1)


def r4(p: int, r: int) -> int:
    """(p+r-1)!! - p r (p-2)!! (r-2)!! = |P2~(p,r)| for odd p, r >= 3."""
    if p % 2 == 0 or r % 2 == 0:
        raise ValueError(f"r4 requires odd p, r; got ({p}, {r})")
    if p < 3 or r < 3:
        raise ValueError("p and r must be at least 3")
    return (
        double_factorial(p + r - 1)
        - p * r * double_factorial(p - 2) * double_factorial(r - 2)
    )


def card_p2tilde_even(p: int, r: int) -> int:
    """(p+r-1)!! - (1 + p r / 2) (p-1)!! (r-1)!! = |P2~(p,r)| for even p, r."""
    if p % 2 or r % 2:
        raise ValueError(f"card_p2tilde_even requires even p, r; got ({p}, {r})")
    if p < 2 or r < 2:
        raise ValueError("p and r must be at least 2")
    return (
        double_factorial(p + r - 1)
        - (2 + p * r) * double_factorial(p - 1) * double_factorial(r - 1) // 2
    )


def card_p2tilde(p: int, r: int) -> int:
    """|P2~(p,r)| for matching-parity p, r; 0 for mixed parity."""
    if (p + r) % 2:
        return 0
    if p % 2:
        return r4(p, r)
    return card_p2tilde_even(p, r)


def wick_sum(cov, indices=None) -> float:
    """Sum over all pairings of products of covariance entries.

    ``cov`` is a symmetric matrix; ``indices`` maps the r paired items to
    rows of ``cov`` (defaults to 0..r-1, and may repeat for joint moments
    of repeated variables).  Returns 0 for odd r.
    """
    c = np.asarray(cov, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ValueError("cov must be a square matrix")
    if not np.allclose(c, c.T, rtol=1e-12, atol=1e-12):
        raise ValueError("cov must be symmetric")
    if indices is None:
        indices = list(range(c.shape[0]))
    idx = list(indices)
    if any(not 0 <= i < c.shape[0] for i in idx):
        raise ValueError("indices out of range for cov")
    r = len(idx)
    if r % 2 == 1:
        return 0.0
    total = 0.0
    for blocks in _pairings(tuple(range(r))):
        term = 1.0
        for a, b in blocks:
            term *= c[idx[a], idx[b]]
        total += term
    return total
