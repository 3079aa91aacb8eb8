"""The two families of covariance integrals and their closed forms.

Each pair partition of {1..p+q} (type I) or mixed 2+2 partition
(type II) induces an integral over one variable per block: blocks
touching the first side range over [-t1, t1], the rest over [-t2, t2].
Type I carries a Dirac constraint forcing the crossing-block variables
to sum to zero; type II has no constraint.  For b > 0 both carry
boundary-indicator products with two auxiliary uniform variables.

Two routes are provided:

* closed forms ``f_type1_closed`` / ``f_type2_closed`` valid at b = 0 --
  type I uses the factor (2 t1)^(k-1) for k crossing blocks, i.e. it
  treats the variable eliminated by the Dirac constraint as
  unconstrained;
* Monte Carlo estimators ``f_type1_numeric`` / ``f_type2_numeric`` of
  the defining integrals, which keep the eliminated variable inside its
  box (samples landing outside [-t1, t1] contribute zero).

The two routes agree only for k <= 2 crossing blocks.  For k >= 3 the
defining integral is smaller by exactly :func:`cube_section_fraction`
(k), the probability that a sum of k-1 independent Uniform[-1, 1]
variables lands in [-1, 1]; ``f_type1_reference`` returns that exact
value.  See the README for the full discussion and the measured
consequences for the covariance constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .combinatorics import MixedPartition24, PairPartition, count_crosses

MIN_BUDGET = 10_000


@dataclass(frozen=True)
class IntegralQuery:
    """One integral: partition, side sizes, times, band ratio, sign."""

    pi: PairPartition | MixedPartition24
    p: int
    q: int
    t1: float
    t2: float
    b: float = 0.0
    sign: str = "minus"

    def __post_init__(self) -> None:
        if self.sign not in ("plus", "minus"):
            raise ValueError(f"sign must be 'plus' or 'minus', got {self.sign!r}")
        if not 0.0 <= self.b <= 1.0:
            raise ValueError(f"b must lie in [0, 1], got {self.b}")
        if not 0 < self.t1 <= self.t2:
            raise ValueError(f"need 0 < t1 <= t2, got ({self.t1}, {self.t2})")
        if self.b > 0 and self.t2 >= 1.0 / self.b:
            raise ValueError(
                f"times must lie in (0, 1/b) = (0, {1.0 / self.b}), got t2={self.t2}"
            )
        if isinstance(self.pi, PairPartition):
            if self.pi.n != self.p + self.q:
                raise ValueError("partition size does not match p+q")
        else:
            if (self.pi.p, self.pi.q) != (self.p, self.q):
                raise ValueError("mixed partition sides do not match (p, q)")


def f_type1_closed(p: int, q: int, k: int, t1: float, t2: float) -> float:
    """2^((p+q)/2-1) t1^((p+k)/2-1) t2^((q-k)/2) for a k-cross partition.

    Exact value of the defining integral only for k <= 2; see module
    docstring.
    """
    if (p + q) % 2:
        raise ValueError("p+q must be even")
    if k < 1 or k > min(p, q) or (p - k) % 2:
        raise ValueError(f"infeasible cross count k={k} for (p, q)=({p}, {q})")
    if not 0 < t1 <= t2:
        raise ValueError(f"need 0 < t1 <= t2, got ({t1}, {t2})")
    return 2.0 ** ((p + q) // 2 - 1) * t1 ** ((p + k) // 2 - 1) * t2 ** ((q - k) // 2)


def f_type2_closed(p: int, q: int, t1: float, t2: float) -> float:
    """2^((p+q)/2-1) t1^(p/2) t2^(q/2-1); exact at b = 0 (no constraint)."""
    if p % 2 or q % 2:
        raise ValueError(f"requires even p, q; got ({p}, {q})")
    if not 0 < t1 <= t2:
        raise ValueError(f"need 0 < t1 <= t2, got ({t1}, {t2})")
    return 2.0 ** ((p + q) // 2 - 1) * t1 ** (p // 2) * t2 ** (q // 2 - 1)


@lru_cache(maxsize=None)
def cube_section_fraction(k: int) -> Fraction:
    """P(|U_1 + ... + U_{k-1}| <= 1) for U_i iid Uniform[-1, 1], exact.

    This is the ratio between the Dirac-constrained volume
    integral(δ(x_1+...+x_k)) over [-1,1]^k and 2^(k-1); equivalently the
    fraction of the (k-1)-cube where the eliminated variable stays in
    its box.  Values: 1, 1, 3/4, 2/3, 115/192, 11/20, ...
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    n = k - 1
    if n == 0:
        return Fraction(1)

    def ih_cdf(x: Fraction) -> Fraction:
        # CDF of a sum of n Uniform(0,1) variables at x
        if x <= 0:
            return Fraction(0)
        if x >= n:
            return Fraction(1)
        s = Fraction(0)
        for j in range(math.floor(x) + 1):
            s += Fraction(-1) ** j * math.comb(n, j) * (x - j) ** n
        return s / math.factorial(n)

    return ih_cdf(Fraction(k, 2)) - ih_cdf(Fraction(k - 2, 2))


def f_type1_reference(p: int, q: int, k: int, t1: float, t2: float) -> float:
    """Exact value of the defining type-I integral at b = 0."""
    return f_type1_closed(p, q, k, t1, t2) * float(cube_section_fraction(k))


def f_type2_reference(p: int, q: int, t1: float, t2: float) -> float:
    """Exact value of the defining type-II integral at b = 0."""
    return f_type2_closed(p, q, t1, t2)


@dataclass(frozen=True)
class _Layout:
    """Variable layout of one integral: who gets which box and sign."""

    block_index: np.ndarray   # element (0-based) -> x-variable index
    signs: np.ndarray         # element -> +-1
    half_widths: np.ndarray   # x-variable -> box half-width (t1 or t2)
    cross_vars: tuple[int, ...]   # x-variable indices of crossing blocks


def _layout_type1(pi: PairPartition, p: int, q: int, t1: float, t2: float) -> _Layout:
    blocks = pi.blocks
    side1 = [i for i, blk in enumerate(blocks) if blk[0] <= p]
    side2 = [i for i, blk in enumerate(blocks) if blk[0] > p]
    order = side1 + side2          # canonical within each group
    pos = {orig: new for new, orig in enumerate(order)}
    n = p + q
    block_index = np.empty(n, dtype=np.int64)
    signs = np.empty(n, dtype=np.int64)
    for orig, (a, b) in enumerate(blocks):
        block_index[a - 1] = pos[orig]
        block_index[b - 1] = pos[orig]
        signs[a - 1] = 1
        signs[b - 1] = -1
    half = np.array([t1] * len(side1) + [t2] * len(side2))
    crosses = tuple(pos[i] for i, (a, b) in enumerate(blocks) if a <= p < b)
    return _Layout(block_index, signs, half, crosses)


def _layout_type2(pi: MixedPartition24, t1: float, t2: float) -> _Layout:
    p, q = pi.p, pi.q
    items: list[tuple[int, tuple[int, ...]]] = [
        (blk[0], blk) for blk in pi.pair_blocks
    ] + [(pi.quad_block[0], pi.quad_block)]
    side1 = sorted(blk for _, blk in items if blk[0] <= p)
    side2 = sorted(blk for _, blk in items if blk[0] > p)
    ordered = side1 + side2
    n = p + q
    block_index = np.empty(n, dtype=np.int64)
    signs = np.empty(n, dtype=np.int64)
    for x_idx, blk in enumerate(ordered):
        for e in blk:
            block_index[e - 1] = x_idx
            if len(blk) == 2:
                signs[e - 1] = 1 if e == blk[0] else -1
            else:
                signs[e - 1] = 1 if e in (blk[0], blk[-1]) else -1
    half = np.array([t1] * len(side1) + [t2] * len(side2))
    return _Layout(block_index, signs, half, ())


def _mc_estimate(
    layout: _Layout,
    p: int,
    q: int,
    b: float,
    sign: str,
    solved: int | None,
    budget: int,
    seed,
) -> tuple[float, float]:
    """Streamed Monte Carlo over the free box variables."""
    nvars = len(layout.half_widths)
    free = [i for i in range(nvars) if i != solved]
    volume = float(np.prod(2.0 * layout.half_widths[free])) if free else 1.0
    rng = np.random.default_rng(seed)
    total = 0.0
    total_sq = 0.0
    done = 0
    batch = min(budget, max(1, 4_000_000 // max(nvars + 2, 1)))
    t1 = layout.half_widths[0] if nvars else 0.0
    while done < budget:
        m = min(batch, budget - done)
        x = np.empty((m, nvars))
        if free:
            x[:, free] = rng.uniform(-1.0, 1.0, (m, len(free))) * layout.half_widths[free]
        values = np.full(m, volume)
        if solved is not None:
            others = [c for c in layout.cross_vars if c != solved]
            x[:, solved] = -x[:, others].sum(axis=1) if others else 0.0
            values = values * (np.abs(x[:, solved]) <= t1)
        if b > 0.0:
            y = layout.signs * x[:, layout.block_index]
            x0 = rng.random(m)
            y0 = rng.random(m)
            s1 = x0[:, None] + b * np.cumsum(y[:, :p], axis=1)
            ok = ((s1 >= 0.0) & (s1 <= 1.0)).all(axis=1)
            s2 = np.cumsum(y[:, p:], axis=1)
            s2 = y0[:, None] - b * s2 if sign == "plus" else y0[:, None] + b * s2
            ok &= ((s2 >= 0.0) & (s2 <= 1.0)).all(axis=1)
            values = values * ok
        total += values.sum()
        total_sq += (values * values).sum()
        done += m
    mean = total / budget
    var = max(total_sq / budget - mean * mean, 0.0) * budget / max(budget - 1, 1)
    return mean, math.sqrt(var / budget)


def f_type1_numeric(query: IntegralQuery, budget: int, seed=0) -> tuple[float, float]:
    """Monte Carlo estimate of the defining type-I integral.

    The Dirac constraint is resolved by solving for the last crossing
    variable in canonical order; a sample is rejected (contributes 0)
    when the solved variable falls outside [-t1, t1].  Returns
    (estimate, stderr).
    """
    if not isinstance(query.pi, PairPartition):
        raise TypeError("type-I integrals take a pair partition")
    if budget < MIN_BUDGET:
        raise ValueError(f"budget must be at least {MIN_BUDGET}, got {budget}")
    k = count_crosses(query.pi, query.p)
    if k == 0:
        raise ValueError("partition has no crossing block; the constraint degenerates")
    layout = _layout_type1(query.pi, query.p, query.q, query.t1, query.t2)
    solved = layout.cross_vars[-1]
    return _mc_estimate(
        layout, query.p, query.q, query.b, query.sign, solved, budget, seed
    )


def f_type2_numeric(query: IntegralQuery, budget: int, seed=0) -> tuple[float, float]:
    """Monte Carlo estimate of the type-II integral (no constraint)."""
    if not isinstance(query.pi, MixedPartition24):
        raise TypeError("type-II integrals take a mixed 2+2 partition")
    if budget < MIN_BUDGET:
        raise ValueError(f"budget must be at least {MIN_BUDGET}, got {budget}")
    layout = _layout_type2(query.pi, query.t1, query.t2)
    return _mc_estimate(
        layout, query.p, query.q, query.b, query.sign, None, budget, seed
    )
