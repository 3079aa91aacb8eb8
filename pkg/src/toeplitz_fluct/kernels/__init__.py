"""Kernel dispatcher: compiled extension with pure-numpy fallback.

The compiled module is used when it imported successfully and
``TOEPLITZ_FLUCT_PURE`` is not set; ``IMPLEMENTATION`` reports which
backend is active.  Both backends compute identical quantities; see
``benchmarks/bench_kernels.py`` for the speed comparison.
"""

from __future__ import annotations

import os

from . import _fallback

if os.environ.get("TOEPLITZ_FLUCT_PURE"):
    _impl = _fallback
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _fallback

IMPLEMENTATION: str = _impl.IMPLEMENTATION

band_matmul = _impl.band_matmul
band_trace = _impl.band_trace
trace_power_banded = _impl.trace_power_banded
balanced_trace = _impl.balanced_trace

pure = _fallback
