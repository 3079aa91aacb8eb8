"""Work caps guarding the exhaustive enumerations.

Every enumeration in this package (pair partitions, balanced-vector
products, trace-formula index grids) is exponential in its inputs, so
each one estimates its work up front and raises :class:`WorkCapExceeded`
instead of silently running forever.  The default budget can be
overridden with the ``TOEPLITZ_FLUCT_WORKCAP`` environment variable.
"""

from __future__ import annotations

import os

ENV_VAR = "TOEPLITZ_FLUCT_WORKCAP"

# Default cap on generic enumeration work (items visited / grid cells).
DEFAULT_WORKCAP = 50_000_000

# Pair partitions of [2k] are capped at 2k <= 16 ground-set elements by
# default, i.e. at most 15!! = 2_027_025 partitions per call.
DEFAULT_PARTITION_CAP = 2_027_025


class WorkCapExceeded(RuntimeError):
    """An enumeration would exceed the configured work budget."""


def workcap() -> int:
    """Current work budget (items/cells), honoring the env override."""
    raw = os.environ.get(ENV_VAR)
    if raw is None:
        return DEFAULT_WORKCAP
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"{ENV_VAR} must be an integer, got {raw!r}") from exc
    if value <= 0:
        raise ValueError(f"{ENV_VAR} must be positive, got {value}")
    return value


def partition_cap() -> int:
    """Maximum number of pair partitions a single enumeration may emit."""
    raw = os.environ.get(ENV_VAR)
    if raw is None:
        return DEFAULT_PARTITION_CAP
    return workcap()


def check_work(amount: float, what: str) -> None:
    """Raise :class:`WorkCapExceeded` if *amount* exceeds the budget."""
    cap = workcap()
    if amount > cap:
        raise WorkCapExceeded(
            f"{what} needs ~{amount:.3g} work units, cap is {cap} "
            f"(override with {ENV_VAR})"
        )
