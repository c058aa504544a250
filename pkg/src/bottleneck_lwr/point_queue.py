"""Within-day point-queue dynamics at the bottleneck.

Rates (``f``, ``g``) live on the M time intervals; cumulative curves, queue
sizes and queueing times live on the M+1 interval boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class LengthMismatch(ValueError):
    pass


class NonInvertible(ValueError):
    pass


@dataclass(frozen=True)
class FlowProfile:
    f: np.ndarray  # (M,) departure rates, veh/h
    g: np.ndarray  # (M,) arrival rates, veh/h
    F: np.ndarray  # (M+1,) cumulative departures
    G: np.ndarray  # (M+1,) cumulative arrivals
    delta: np.ndarray  # (M+1,) queue size
    upsilon: np.ndarray  # (M+1,) queueing time of vehicles arriving at each boundary, h
    dt: float

    def departure_delay(self, C: float) -> np.ndarray:
        """Queueing time of vehicles departing at each boundary (``delta / C``)."""
        return self.delta / C

    def at_centers(self, values: np.ndarray) -> np.ndarray:
        """Linear interpolation of a boundary quantity to interval centers."""
        return 0.5 * (values[:-1] + values[1:])

    def cumulative_departures(self, t: np.ndarray | float, t0: float) -> np.ndarray:
        """Piecewise-linear interpolant of ``F`` (slope ``f[m]`` on interval m)."""
        t = np.asarray(t, dtype=float)
        s = (t - t0) / self.dt
        m = np.clip(np.floor(s).astype(np.int64), 0, len(self.f) - 1)
        return self.F[m] + (s - m) * self.dt * self.f[m]


def cumulate(rates: np.ndarray, dt: float) -> np.ndarray:
    out = np.zeros(len(rates) + 1)
    np.cumsum(rates * dt, out=out[1:])
    return out


def propagate_queue(f: np.ndarray, C: float, dt: float, M: int | None = None) -> FlowProfile:
    """Run the discrete point queue from an empty queue at ``t0``.

    ``g[m] = min(delta[m]/dt + f[m], C)`` and
    ``delta[m+1] = max(0, delta[m] + (f[m] - C)*dt)``.
    """
    f = np.asarray(f, dtype=float)
    if f.ndim != 1 or (M is not None and len(f) != M):
        raise LengthMismatch(f"expected {M} departure rates, got shape {f.shape}")
    if np.any(f < 0) or not np.all(np.isfinite(f)):
        raise ValueError("departure rates must be finite and nonnegative")

    n = len(f)
    delta = np.zeros(n + 1)
    g = np.empty(n)
    d = 0.0
    for m in range(n):
        fm = f[m]
        g[m] = min(d / dt + fm, C)
        d = max(0.0, d + (fm - C) * dt)
        delta[m + 1] = d

    F = cumulate(f, dt)
    # same as cumulating g, but exact wherever the queue is empty
    G = F - delta
    upsilon = queueing_times(F, G, f, dt)
    return FlowProfile(f=f, g=g, F=F, G=G, delta=delta, upsilon=upsilon, dt=dt)


def queueing_times(F: np.ndarray, G: np.ndarray, f: np.ndarray, dt: float) -> np.ndarray:
    """Queueing time of the vehicle arriving at each boundary.

    Inverts the piecewise-linear departure curve: with ``m'`` the largest
    boundary where ``F[m'] < G[m]``, the vehicle departed inside interval
    ``m'`` and waited ``(m - m')*dt - (G[m] - F[m'])/f[m']``. Where the curve
    is flat at level ``G[m]`` the earliest consistent departure is used, which
    gives the largest admissible queueing time.
    """
    ups = np.zeros(len(G))
    idx = np.nonzero(F > G)[0]
    if idx.size == 0:
        return ups
    target = G[idx]
    mp = np.searchsorted(F, target, side="left") - 1
    if np.any(mp < 0):
        raise NonInvertible("no departure boundary lies below the arrival count")
    rate = f[mp]
    if np.any(rate <= 0):
        raise NonInvertible("departure curve is flat where it should cross the arrival count")
    ups[idx] = (idx - mp) * dt - (target - F[mp]) / rate
    return ups
