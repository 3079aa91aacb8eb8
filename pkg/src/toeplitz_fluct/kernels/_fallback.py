"""Pure-numpy implementations of the trace kernels.

Used when the compiled extension is unavailable or disabled via
``TOEPLITZ_FLUCT_PURE=1``.  Semantics match ``_core`` exactly; only the
inner loops differ.
"""

from __future__ import annotations

import numpy as np

IMPLEMENTATION = "python"


def band_matmul(a: np.ndarray, wa: int, b: np.ndarray, wb: int, n: int) -> np.ndarray:
    """Multiply two banded matrices stored as diagonal stripes.

    ``a`` has shape (n, 2*wa+1) with a[i, wa+d] = A[i, i+d]; same layout
    for ``b``.  Returns the product in the same layout with half-width
    wa+wb.
    """
    wc = wa + wb
    c = np.zeros((n, 2 * wc + 1))
    for e in range(-wa, wa + 1):
        # rows i where column i+e exists
        lo, hi = max(0, -e), min(n, n - e)
        if lo >= hi:
            continue
        col = a[lo:hi, wa + e]
        # C[i, i+e+f] += A[i, i+e] * B[i+e, i+e+f]
        c[lo:hi, wc + e - wb: wc + e + wb + 1] += col[:, None] * b[lo + e: hi + e, :]
    return c


def band_trace(a: np.ndarray, w: int, n: int) -> float:
    return float(a[:, w].sum())


def trace_power_banded(band: np.ndarray, w: int, n: int, p: int) -> float:
    """Trace of the p-th power of a banded matrix in stripe storage."""
    if p == 1:
        return band_trace(band, w, n)
    acc = band
    wacc = w
    for _ in range(p - 1):
        acc = band_matmul(acc, wacc, band, w, n)
        wacc += w
    return band_trace(acc, wacc, n)


def balanced_trace(coeffs: list[np.ndarray], widths: list[int], n: int) -> float:
    """Trace of a product of band Toeplitz matrices via the lag sum.

    ``coeffs[l]`` holds the diagonal values of factor l: coeffs[l][w+d]
    is the entry on diagonal d, |d| <= widths[l].  The sum runs over all
    lag tuples with zero total; each contributes the product of its
    coefficients times the number of start rows keeping every partial
    sum inside [1, n].
    """
    p = len(coeffs)
    if p == 1:
        return float(n * coeffs[0][widths[0]])
    s = np.zeros(1, dtype=np.int64)       # running partial sums
    hi = np.zeros(1, dtype=np.int64)       # max partial sum so far (>= 0)
    lo = np.zeros(1, dtype=np.int64)       # min partial sum so far (<= 0)
    weight = np.ones(1)
    for l in range(p - 1):
        w = widths[l]
        lags = np.arange(-w, w + 1, dtype=np.int64)
        s = (s[:, None] + lags[None, :]).ravel()
        hi = np.maximum(hi[:, None], s.reshape(len(hi), -1)).ravel()
        lo = np.minimum(lo[:, None], s.reshape(len(lo), -1)).ravel()
        weight = (weight[:, None] * coeffs[l][None, :]).ravel()
    # last lag is forced to -s by the zero-sum constraint
    wlast = widths[-1]
    ok = np.abs(s) <= wlast
    counts = np.clip(n - hi + lo, 0, None)
    vals = weight * counts
    last = coeffs[-1][np.clip(wlast - s, 0, 2 * wlast)]
    return float(np.sum(np.where(ok, vals * last, 0.0)))
