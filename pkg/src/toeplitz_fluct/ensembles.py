"""Random band Toeplitz ensembles and trace machinery.

Two matrix families share one entry symmetry (a_{-i} = a_i, a_0 = 0)
and one scaling 1/sqrt(b_n):

* model A: static entries, bandwidth floor(b_n * t) grows with t;
* model B: Brownian-motion entries evaluated at t, fixed bandwidth b_n.

Traces of powers are computed two independent ways: dense/banded matrix
multiplication (:func:`trace_power_dense`) and the lag summation
(:func:`trace_product_formula`), which sums coefficient products over
zero-sum lag tuples weighted by the exact count of admissible start
rows.  The second route is the hot path: for a Toeplitz band matrix it
needs no matrix at all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import kernels
from .caps import check_work

FAMILIES = ("gaussian", "rademacher", "uniform-scaled", "custom-moments")

_FAMILY_KAPPA = {"gaussian": 3.0, "rademacher": 1.0, "uniform-scaled": 1.8}


@dataclass(frozen=True)
class EntryModel:
    """Law of the i.i.d. entry sequence a_1, a_2, ...

    All families are centered with unit variance; ``kappa`` is the
    fourth moment.  ``custom-moments`` uses the symmetric three-point
    law on {-sqrt(kappa), 0, sqrt(kappa)}, which realizes any kappa >= 1
    exactly.  Mode ``brownian`` replaces the static entries by
    independent standard Brownian motions (model B).
    """

    family: str = "gaussian"
    kappa: float | None = None
    mode: str = "static"

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.mode not in ("static", "brownian"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.family == "custom-moments":
            if self.kappa is None:
                raise ValueError("custom-moments requires kappa")
            if self.kappa < 1.0:
                raise ValueError("fourth moment kappa must be >= 1")
        elif self.kappa is not None and not math.isclose(
            self.kappa, _FAMILY_KAPPA[self.family]
        ):
            raise ValueError(
                f"family {self.family!r} has kappa={_FAMILY_KAPPA[self.family]}, "
                f"got {self.kappa}"
            )
        if self.mode == "brownian" and self.family != "gaussian":
            raise ValueError("brownian mode requires gaussian increments")

    @property
    def fourth_moment(self) -> float:
        if self.kappa is not None:
            return float(self.kappa)
        return _FAMILY_KAPPA[self.family]


@dataclass(frozen=True)
class MatrixSpec:
    """One matrix instance: size, base bandwidth, time, model letter."""

    n: int
    b_n: int
    t: float
    model: str

    def __post_init__(self) -> None:
        if self.model not in ("A", "B"):
            raise ValueError(f"model must be 'A' or 'B', got {self.model!r}")
        if self.n < 2 or self.b_n < 1:
            raise ValueError("need n >= 2 and b_n >= 1")
        if self.b_n > self.n:
            raise ValueError(f"b_n={self.b_n} exceeds n={self.n}")
        if self.t <= 0:
            raise ValueError("t must be positive")
        if self.model == "A" and self.bandwidth > self.n - 1:
            raise ValueError(
                f"model A bandwidth floor(b_n*t)={self.bandwidth} exceeds n-1={self.n - 1}"
            )

    @property
    def bandwidth(self) -> int:
        """Half-width of the band: floor(b_n*t) for A, b_n for B.

        The floor is taken in exact arithmetic on the binary value of t.
        """
        if self.model == "A":
            return int(math.floor(Fraction(self.t) * self.b_n))
        return self.b_n


@dataclass(frozen=True)
class SamplePath:
    """Entry values for one replica at the requested times.

    ``values`` has shape (lags,) in static mode (shared across times)
    and (len(times), lags) in brownian mode, coupled across times by
    common increments.
    """

    mode: str
    times: tuple[float, ...]
    values: np.ndarray
    seed: int
    replica: int

    def values_at(self, t: float) -> np.ndarray:
        if self.mode == "static":
            return self.values
        for i, ti in enumerate(self.times):
            if ti == t:
                return self.values[i]
        raise KeyError(f"time {t} not in sampled times {self.times}")


def replica_rng(seed: int, replica: int) -> np.random.Generator:
    """Counter-based stream keyed by (seed, replica); never overlaps."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(replica,))
    return np.random.Generator(np.random.Philox(ss))


def _draw(family: str, kappa: float | None, rng: np.random.Generator, size) -> np.ndarray:
    if family == "gaussian":
        return rng.standard_normal(size)
    if family == "rademacher":
        return rng.integers(0, 2, size=size) * 2.0 - 1.0
    if family == "uniform-scaled":
        s = math.sqrt(3.0)
        return rng.uniform(-s, s, size=size)
    c = math.sqrt(kappa)
    u = rng.random(size)
    return np.where(u < 0.5 / kappa, -c, np.where(u < 1.0 / kappa, c, 0.0))


def sample_path(
    model: EntryModel, lags: int, times, seed: int, replica: int
) -> SamplePath:
    """Deterministic entry draw for one replica.

    Static mode ignores the times for the values themselves; brownian
    mode returns cumulative sums of independent Gaussian increments with
    variance equal to each interval length.
    """
    times = tuple(float(t) for t in times)
    if not times:
        raise ValueError("need at least one time")
    if any(t <= 0 for t in times) or any(
        t2 <= t1 for t1, t2 in zip(times, times[1:])
    ):
        raise ValueError(f"times must be strictly increasing and positive: {times}")
    if lags < 1:
        raise ValueError("need at least one lag")
    rng = replica_rng(seed, replica)
    if model.mode == "static":
        values = _draw(model.family, model.kappa, rng, lags)
        return SamplePath("static", times, values, seed, replica)
    deltas = np.diff(np.concatenate(([0.0], np.asarray(times))))
    increments = rng.standard_normal((len(times), lags)) * np.sqrt(deltas)[:, None]
    return SamplePath("brownian", times, np.cumsum(increments, axis=0), seed, replica)


def lag_coefficients(entries: np.ndarray, bandwidth: int, b_n: int) -> np.ndarray:
    """Full diagonal coefficient vector of the scaled matrix.

    Index w+d holds the value on diagonal d: a_|d| / sqrt(b_n), with 0
    at the center (a_0 = 0).  ``entries[i]`` is a_{i+1}.
    """
    if len(entries) < bandwidth:
        raise ValueError(f"need {bandwidth} lags, path has {len(entries)}")
    c = np.zeros(2 * bandwidth + 1)
    scale = 1.0 / math.sqrt(b_n)
    pos = np.asarray(entries[:bandwidth]) * scale
    c[bandwidth + 1:] = pos
    c[:bandwidth] = pos[::-1]
    return c


def build_matrix(spec: MatrixSpec, path: SamplePath) -> np.ndarray:
    """Dense n x n symmetric band Toeplitz matrix for one replica."""
    check_work(float(spec.n) ** 2, f"dense {spec.n}x{spec.n} matrix")
    w = spec.bandwidth
    coeffs = lag_coefficients(path.values_at(spec.t), w, spec.b_n)
    idx = np.arange(spec.n)
    d = idx[None, :] - idx[:, None]
    m = np.where(np.abs(d) <= w, coeffs[np.clip(d + w, 0, 2 * w)], 0.0)
    return m


def band_storage(m: np.ndarray) -> tuple[np.ndarray, int]:
    """Stripe storage (band[i, w+d] = M[i, i+d]) and half-width of M."""
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    if m.ndim != 2 or m.shape[1] != n:
        raise ValueError("matrix must be square")
    nz = np.nonzero(m)
    w = int(np.max(np.abs(nz[0] - nz[1]))) if nz[0].size else 0
    band = np.zeros((n, 2 * w + 1))
    for d in range(-w, w + 1):
        lo, hi = max(0, -d), min(n, n - d)
        band[lo:hi, w + d] = m[np.arange(lo, hi), np.arange(lo, hi) + d]
    return band, w


def trace_power_dense(m: np.ndarray, p: int) -> float:
    """tr(M^p) by repeated multiplication, exploiting the band.

    The band of M^k grows by the half-width of M per multiply, so the
    banded route costs O(n (p w)^2) instead of O(p n^3).  Falls back to
    plain dense powers when the band covers most of the matrix.
    """
    if p < 1:
        raise ValueError("power must be >= 1")
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    band, w = band_storage(m)
    if p * w >= n:  # band would fill up; dense is simpler and no slower
        return float(np.trace(np.linalg.matrix_power(m, p)))
    return float(kernels.trace_power_banded(band, w, n, p))


def trace_product_dense(mats) -> float:
    """Plain-matmul trace of a product; oracle for the lag summation."""
    acc = np.asarray(mats[0], dtype=float)
    for m in mats[1:]:
        acc = acc @ np.asarray(m, dtype=float)
    return float(np.trace(acc))


def trace_product_formula(entry_vectors, bandwidths, n: int) -> float:
    """Trace of a product of band Toeplitz matrices from lag data alone.

    ``entry_vectors[l]`` holds the diagonal coefficients of factor l,
    indexed w_l+d for diagonal d in [-w_l, w_l]; factors may have
    different bandwidths.  Sums coefficient products over all zero-sum
    lag tuples, each weighted by the number of start rows i for which
    every partial sum stays inside the matrix.
    """
    widths = [int(w) for w in bandwidths]
    if len(entry_vectors) != len(widths) or not widths:
        raise ValueError("need one coefficient vector per bandwidth")
    if any(w < 0 or w > n - 1 for w in widths):
        raise ValueError(f"bandwidths must lie in [0, n-1], got {widths}")
    coeffs = []
    for vec, w in zip(entry_vectors, widths):
        arr = np.ascontiguousarray(vec, dtype=float)
        if arr.shape != (2 * w + 1,):
            raise ValueError(
                f"coefficient vector has shape {arr.shape}, expected {(2 * w + 1,)}"
            )
        coeffs.append(arr)
    grid = 1.0
    for w in widths[:-1]:
        grid *= 2 * w + 1
    check_work(grid, f"lag grid for p={len(widths)} factors")
    return float(kernels.balanced_trace(coeffs, widths, n))


class BalancedTracePlan:
    """Precomputed lag grid for evaluating many replicas cheaply.

    Fixes (widths, n) once: flattened per-factor lag indices plus the
    admissible-row count of every zero-sum tuple.  ``periodic=True``
    replaces the counts by n (no boundary indicators), which is the
    reference summation used by the commutativity check.
    """

    def __init__(self, bandwidths, n: int, periodic: bool = False):
        widths = [int(w) for w in bandwidths]
        p = len(widths)
        if p < 1:
            raise ValueError("need at least one factor")
        grid = 1.0
        for w in widths[:-1]:
            grid *= 2 * w + 1
        check_work(grid, f"trace plan for p={p} factors")
        self.widths = widths
        self.n = n
        self.p = p
        if p == 1:
            self.indices = [np.array([widths[0]], dtype=np.int64)]
            self.counts = np.array([float(n)])
            return
        s = np.zeros(1, dtype=np.int64)
        hi = np.zeros(1, dtype=np.int64)
        lo = np.zeros(1, dtype=np.int64)
        idx: list[np.ndarray] = []
        for w in widths[:-1]:
            lags = np.arange(-w, w + 1, dtype=np.int64)
            m = len(s)
            idx = [np.repeat(a, len(lags)) for a in idx]
            idx.append(np.tile(lags + w, m))
            s = (s[:, None] + lags[None, :]).ravel()
            hi = np.maximum(hi[:, None], s.reshape(m, -1)).ravel()
            lo = np.minimum(lo[:, None], s.reshape(m, -1)).ravel()
        wl = widths[-1]
        ok = np.abs(s) <= wl
        idx = [a[ok] for a in idx]
        idx.append((wl - s[ok]).astype(np.int64))
        counts = np.full(len(s), float(n)) if periodic else np.clip(
            n - hi + lo, 0, None
        ).astype(float)
        self.indices = idx
        self.counts = counts[ok]

    def evaluate(self, coeff_vectors) -> float:
        """Trace for one replica's coefficient vectors."""
        prod = self.counts.copy()
        for arr, ix in zip(coeff_vectors, self.indices):
            prod *= np.asarray(arr, dtype=float)[ix]
        return float(prod.sum())

    def evaluate_batch(self, coeff_matrices, max_cells: int = 20_000_000) -> np.ndarray:
        """Traces for a batch: coeff_matrices[l] has shape (R, 2 w_l + 1).

        Processes replicas in blocks so the (rows x grid) temporary stays
        under ``max_cells`` entries.
        """
        mats = [np.asarray(m, dtype=float) for m in coeff_matrices]
        rows = mats[0].shape[0]
        grid = len(self.counts)
        block = max(1, min(rows, max_cells // max(grid, 1)))
        out = np.empty(rows)
        for lo in range(0, rows, block):
            hi = min(rows, lo + block)
            prod = mats[0][lo:hi, self.indices[0]]
            for arr, ix in zip(mats[1:], self.indices[1:]):
                prod = prod * arr[lo:hi, ix]
            out[lo:hi] = prod @ self.counts
        return out


@lru_cache(maxsize=32)
def cached_plan(widths: tuple, n: int, periodic: bool = False) -> BalancedTracePlan:
    return BalancedTracePlan(widths, n, periodic=periodic)


def omega_statistics(trace_values, n: int, b_n: int) -> np.ndarray:
    """Centered fluctuation statistics sqrt(b_n)/n (tr - mean tr).

    The population expectation is replaced by the across-replica sample
    mean, so the outputs sum to exactly zero.
    """
    traces = np.asarray(trace_values, dtype=float)
    if traces.size < 2:
        raise ValueError("need at least 2 replicas to center")
    return math.sqrt(b_n) / n * (traces - traces.mean())
