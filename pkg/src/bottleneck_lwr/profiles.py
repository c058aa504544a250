"""Piecewise-constant departure profiles on the time grid."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .config import ValidatedConfig
from .grids import TimeGrid


class ProfileError(ValueError):
    pass


def piecewise_rates(starts: Sequence[float], rates: Sequence[float], time: TimeGrid,
                    align_tol: float = 1e-9) -> np.ndarray:
    """Expand ``(t_start, rate)`` rows into per-interval rates.

    Row ``n`` applies on ``(starts[n], starts[n+1]]``; the last row runs to the
    end of the horizon and the rate is 0 before the first start. Starts must sit
    on interval boundaries.
    """
    starts = np.asarray(starts, dtype=float)
    rates = np.asarray(rates, dtype=float)
    if starts.shape != rates.shape or starts.ndim != 1:
        raise ProfileError("starts and rates must be 1-D and of equal length")
    if len(starts) and np.any(np.diff(starts) <= 0):
        raise ProfileError("t_start values must be strictly increasing")
    if np.any(rates < 0) or not np.all(np.isfinite(rates)):
        raise ProfileError("rates must be finite and nonnegative")
    t0, t_end = time.boundaries[0], time.boundaries[-1]
    pos = (starts - t0) / time.dt
    if np.any(np.abs(pos - np.round(pos)) > align_tol * np.maximum(1.0, np.abs(pos))):
        raise ProfileError("every t_start must fall on a time-grid boundary")
    if len(starts) and (starts[0] < t0 - align_tol or starts[-1] > t_end + align_tol):
        raise ProfileError(f"t_start values must lie within [{t0}, {t_end}]")

    f = np.zeros(time.M)
    b = np.round(pos).astype(np.int64)
    for n in range(len(starts)):
        hi = b[n + 1] if n + 1 < len(starts) else time.M
        f[b[n]:hi] = rates[n]
    return f


def demo_breakpoints(vc: ValidatedConfig) -> tuple[list[float], list[float]]:
    """Initial departure profile of the worked example, as ``(t_start, rate)`` rows."""
    C = vc.C
    starts = [-2.2, -1.4, -1.1, -0.3, 0.0, 0.5]
    rates = [0.5 * C, 2.0 * C, 0.25 * C, 2.0 * C, 0.4 * C, 0.0]
    return starts, rates


def demo_departures(vc: ValidatedConfig, time: TimeGrid) -> np.ndarray:
    return piecewise_rates(*demo_breakpoints(vc), time)
