"""Balanced-vector machinery: correlation, clusters, reduction.

A balanced vector is an integer vector with non-zero components summing
to zero; these are the surviving index tuples of the band trace formula.
Two vectors are correlated when their absolute-value multisets share an
element.  The reduction splices two correlated vectors of lengths p and
q into one balanced vector of length p+q-2; ``enumerate_preimages``
inverts it, realizing the bound of at most 2 p q pre-images per target.
"""

from __future__ import annotations

import itertools
from collections import Counter
from collections.abc import Iterator, Sequence
from dataclasses import dataclass

from .caps import WorkCapExceeded, check_work


@dataclass(frozen=True)
class BalancedVector:
    """Integer vector with non-zero components summing to zero."""

    components: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(c == 0 for c in self.components):
            raise ValueError("components must be non-zero")
        if sum(self.components) != 0:
            raise ValueError(f"components must sum to zero, got {self.components}")

    def __len__(self) -> int:
        return len(self.components)

    def negated(self) -> "BalancedVector":
        return BalancedVector(tuple(-c for c in self.components))


@dataclass(frozen=True)
class ClusterDecomposition:
    """Connected components of the correlation graph, by least index."""

    clusters: tuple[tuple[int, ...], ...]


def support_multiset(v: BalancedVector | Sequence[int]) -> Counter:
    """Absolute values of the components, with multiplicity."""
    comps = v.components if isinstance(v, BalancedVector) else v
    return Counter(abs(c) for c in comps)


def correlated(v1, v2) -> bool:
    """True iff the support multisets share at least one value."""
    return bool(support_multiset(v1).keys() & support_multiset(v2).keys())


def cluster_decompose(vs: Sequence[BalancedVector]) -> ClusterDecomposition:
    """Partition indices 0..len(vs)-1 into maximal correlated clusters."""
    n = len(vs)
    supports = [support_multiset(v).keys() for v in vs]
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if supports[i] & supports[j]:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    clusters = tuple(tuple(groups[root]) for root in sorted(groups))
    return ClusterDecomposition(clusters)


def reduce_pair(j: BalancedVector, jp: BalancedVector) -> tuple[BalancedVector, bool]:
    """Splice two correlated vectors into one of length p+q-2.

    Finds the first joint point ``j[u]`` (smallest u whose absolute value
    occurs in ``jp``) and the first matching component ``jp[v]``.  When
    they carry the same sign, ``jp`` is negated first (reported in the
    returned flag).  The result replaces ``j[u]`` with ``jp`` minus its
    v-th component, spliced in place.
    """
    sj = support_multiset(jp).keys()
    u = next((i for i, c in enumerate(j.components) if abs(c) in sj), None)
    if u is None:
        raise ValueError("vectors are not correlated")
    target = abs(j.components[u])
    v = next(i for i, c in enumerate(jp.components) if abs(c) == target)
    negate = j.components[u] == jp.components[v]
    jpc = tuple(-c for c in jp.components) if negate else jp.components
    spliced = (
        j.components[:u]
        + jpc[:v]
        + jpc[v + 1:]
        + j.components[u + 1:]
    )
    return BalancedVector(spliced), negate


def balanced_vectors(length: int, bound: int) -> list[BalancedVector]:
    """All balanced vectors of the given length over {±1..±bound}."""
    if length < 2 or bound < 1:
        return []
    check_work(float(2 * bound) ** (length - 1), f"balanced vectors of length {length}")
    values = [v for v in range(-bound, bound + 1) if v != 0]
    out: list[BalancedVector] = []

    def rec(prefix: list[int], remaining: int, total: int) -> None:
        if remaining == 1:
            last = -total
            if last != 0 and -bound <= last <= bound:
                out.append(BalancedVector(tuple(prefix) + (last,)))
            return
        for v in values:
            prefix.append(v)
            rec(prefix, remaining - 1, total + v)
            prefix.pop()

    rec([], length, 0)
    return out


def enumerate_preimages(
    l: BalancedVector, p: int, q: int, bound: int
) -> list[tuple[BalancedVector, BalancedVector]]:
    """All correlated pairs (J, J') over {±1..±bound} reducing to *l*.

    Both sign conventions are emitted: whenever (J, J') reduces to *l*,
    so may (J, -J'); each ordered pair appears once.  Candidates are
    built by inverting the splice at every cut position (u, v), filtered
    by the first-joint-point conditions, and kept only if the round trip
    through :func:`reduce_pair` reproduces *l* exactly.
    """
    if len(l) != p + q - 2:
        raise ValueError(f"l has length {len(l)}, expected p+q-2={p + q - 2}")
    comps = l.components
    out: list[tuple[BalancedVector, BalancedVector]] = []
    seen: set[tuple[tuple[int, ...], tuple[int, ...]]] = set()
    for u in range(1, p + 1):          # 1-based slot of the joint point in J
        middle = comps[u - 1: u + q - 2]
        s = sum(middle)
        if s == 0 or abs(s) > bound:
            continue
        # first-joint-point condition on the J side
        if any(abs(c) == abs(s) for c in comps[: u - 1]):
            continue
        j = BalancedVector(comps[: u - 1] + (s,) + comps[u + q - 2:])
        for v in range(1, q):          # 1-based slot of the match in J'
            # first-match condition on the J' side
            if any(abs(c) == abs(s) for c in middle[: v - 1]):
                continue
            jp = BalancedVector(middle[: v - 1] + (-s,) + middle[v - 1:])
            for cand in (jp, jp.negated()):
                key = (j.components, cand.components)
                if key in seen:
                    continue
                reduced, _ = reduce_pair(j, cand)
                if reduced.components == comps:
                    seen.add(key)
                    out.append((j, cand))
    return out


def count_cluster_set(l: int, ps: Sequence[int], bound: int) -> int:
    """Exhaustive count of single-cluster tuples with doubled support.

    Counts tuples (J_1, ..., J_l) of balanced vectors with components in
    {±1..±bound} such that every value of the union support multiset has
    multiplicity at least two and the tuple forms one cluster.
    """
    if l <= 2:
        raise ValueError("cluster counting requires l > 2")
    if len(ps) != l:
        raise ValueError(f"need {l} vector lengths, got {len(ps)}")
    slots = [balanced_vectors(length, bound) for length in ps]
    total_work = 1.0
    for s in slots:
        total_work *= max(len(s), 1)
    check_work(total_work, f"cluster tuples over {tuple(ps)} with bound {bound}")

    supports = [[support_multiset(v) for v in slot] for slot in slots]
    keysets = [[frozenset(c.keys()) for c in sup] for sup in supports]

    count = 0
    for combo in itertools.product(*(range(len(s)) for s in slots)):
        keys = [keysets[i][c] for i, c in enumerate(combo)]
        # connectivity of the correlation graph on l nodes
        reached = {0}
        frontier = [0]
        while frontier:
            a = frontier.pop()
            for b in range(l):
                if b not in reached and keys[a] & keys[b]:
                    reached.add(b)
                    frontier.append(b)
        if len(reached) != l:
            continue
        merged: Counter = Counter()
        for i, c in enumerate(combo):
            merged.update(supports[i][c])
        if min(merged.values()) >= 2:
            count += 1
    return count
