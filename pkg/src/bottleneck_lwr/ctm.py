"""Cell Transmission Model for the day-to-day evolution of imaginary density.

Vehicles on the imaginary road travel toward payoff 0 (cell 0). The
boundary at payoff 0 is closed and nothing enters through payoff ``-L``.
Flux array ``q`` is indexed by payoff boundary: ``q[b]`` crosses payoff
``-b*dx`` from cell ``b`` into cell ``b-1``; ``q[0] = q[I] = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .payoff_road import DensityProfile


@dataclass(frozen=True)
class FluxState:
    d: np.ndarray  # (I,) demand, veh/day
    s: np.ndarray  # (I,) supply, veh/day
    q: np.ndarray  # (I+1,) boundary fluxes, veh/day


def fluxes(k: np.ndarray, kappa: float, u: float, w: float) -> FluxState:
    kappa_c = w * kappa / (u + w)
    d = u * np.minimum(k, kappa_c)
    s = w * (kappa - np.maximum(k, kappa_c))
    q = np.zeros(len(k) + 1)
    q[1:-1] = np.minimum(d[1:], s[:-1])
    return FluxState(d=d, s=s, q=q)


def ctm_step(k: np.ndarray, kappa: float, u: float, w: float, dx: float, dr: float) -> np.ndarray:
    """One Godunov/CTM update of cell densities over a day step ``dr``."""
    q = fluxes(k, kappa, u, w).q
    k_new = k + (dr / dx) * (q[1:] - q[:-1])
    slack = 1e-9 * kappa
    if k_new.min() < -slack or k_new.max() > kappa + slack:
        raise AssertionError(
            "density left [0, kappa]; the CFL condition dx/dr >= max(u, w) must be violated"
        )
    return np.clip(k_new, 0.0, kappa)


def day_step(density: DensityProfile, u: float, w: float, dr: float) -> DensityProfile:
    return density.with_k(ctm_step(density.k, density.kappa, u, w, density.dx, dr))


@dataclass(frozen=True)
class StopRule:
    """Stop when the density stalls, the UE gap is small, or the day cap is hit.

    ``change_tol`` is absolute (veh/$). ``gap_tol=None`` disables the gap test.
    """

    max_days: float
    change_tol: float
    gap_tol: Optional[float] = None

    @classmethod
    def for_config(cls, vc, gap: bool = True) -> "StopRule":
        return cls(
            max_days=vc.max_days,
            change_tol=1e-10 * vc.kappa,
            gap_tol=vc.ue_gap_tol if gap else None,
        )

    def max_steps(self, dr: float) -> int:
        return int(math.floor(self.max_days / dr + 1e-9))

    def reason(self, change: float | None, gap: float | None) -> str | None:
        if self.gap_tol is not None and gap is not None and gap < self.gap_tol:
            return "ue_gap"
        if change is not None and change < self.change_tol:
            return "stationary"
        return None


@dataclass
class Trajectory:
    days: list[float] = field(default_factory=list)
    densities: list[DensityProfile] = field(default_factory=list)
    changes: list[float] = field(default_factory=list)
    gaps: list[float] = field(default_factory=list)
    reason: str = "max_days"

    @property
    def converged(self) -> bool:
        return self.reason != "max_days"

    @property
    def final(self) -> DensityProfile:
        return self.densities[-1]


def run_until(
    k0: DensityProfile,
    u: float,
    w: float,
    dr: float,
    stop: StopRule,
    gap: Callable[[DensityProfile], float] | None = None,
    keep: bool = True,
) -> Trajectory:
    """Iterate :func:`day_step` from ``k0`` until ``stop`` fires.

    With ``keep=False`` only the initial and latest densities are retained.
    A run that hits ``max_days`` is reported through ``Trajectory.reason``;
    it is not an error.
    """
    traj = Trajectory()
    current = k0
    traj.days.append(0.0)
    traj.densities.append(current)
    traj.changes.append(float("nan"))
    g0 = gap(current) if gap else None
    traj.gaps.append(float("nan") if g0 is None else g0)
    if stop.reason(None, g0) is not None:
        traj.reason = stop.reason(None, g0)
        return traj

    for step in range(1, stop.max_steps(dr) + 1):
        nxt = day_step(current, u, w, dr)
        change = float(np.max(np.abs(nxt.k - current.k))) if len(nxt.k) else 0.0
        gv = gap(nxt) if gap else None
        current = nxt
        if not keep and len(traj.days) > 1:
            for seq in (traj.days, traj.densities, traj.changes, traj.gaps):
                seq.pop()
        traj.days.append(step * dr)
        traj.densities.append(current)
        traj.changes.append(change)
        traj.gaps.append(float("nan") if gv is None else gv)
        why = stop.reason(change, gv)
        if why is not None:
            traj.reason = why
            break
    return traj
