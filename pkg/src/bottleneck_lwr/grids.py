"""Coupled discretizations of the within-day time axis and the payoff axis.

Arrays are 0-based. Time interval ``m`` (``0 <= m < M``) spans
``[t0 + m*dt, t0 + (m+1)*dt]``. Payoff cell ``j`` (``0 <= j < I``) is the
cell the literature numbers ``i = -j``; it spans ``(-(j+1)*dx, -j*dx]``, so
cell 0 sits against the closed end of the imaginary road at payoff 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ValidatedConfig


@dataclass(frozen=True)
class TimeGrid:
    M: int
    dt: float
    boundaries: np.ndarray  # (M+1,)
    centers: np.ndarray  # (M,)


@dataclass(frozen=True)
class PayoffGrid:
    """Payoff cells and the two time-axis preimages of each cell.

    ``cell_of_center[m]`` is the cell whose preimage contains center ``m``;
    ``early_of_center[m]`` says whether it lies on the early (``t <= t_star``)
    branch. ``early_slices[j]`` / ``late_slices[j]`` are the index ranges of
    centers in the early and late preimage of cell ``j``.
    """

    I: int
    dx: float
    boundaries: np.ndarray  # (I+1,) payoffs 0, -dx, ..., -I*dx
    centers: np.ndarray  # (I,) (i - 1/2)*dx with i = -j
    t1: np.ndarray  # (I+1,) early-branch time of each payoff boundary
    t2: np.ndarray  # (I+1,) late-branch time of each payoff boundary
    cell_of_center: np.ndarray  # (M,) int
    early_of_center: np.ndarray  # (M,) bool
    early_slices: tuple[slice, ...]
    late_slices: tuple[slice, ...]

    def signed_index(self, j: int | np.ndarray) -> int | np.ndarray:
        """Signed cell number ``i = -j`` (0, -1, ..., -I+1)."""
        return -j

    def early_interval(self, j: int) -> tuple[float, float]:
        """Half-open ``(t_{1,i-1}, t_{1,i}]`` for cell ``j``."""
        return float(self.t1[j + 1]), float(self.t1[j])

    def late_interval(self, j: int) -> tuple[float, float]:
        """Half-open ``[t_{2,i}, t_{2,i-1})`` for cell ``j``."""
        return float(self.t2[j]), float(self.t2[j + 1])


def build_grids(vc: ValidatedConfig) -> tuple[TimeGrid, PayoffGrid]:
    M, I = vc.M, vc.I
    m = np.arange(M)
    time = TimeGrid(
        M=M,
        dt=vc.dt,
        boundaries=vc.t0 + np.arange(M + 1) * vc.dt,
        centers=vc.t0 + (m + 0.5) * vc.dt,
    )

    # Integer arithmetic on center offsets from t_star: a center is
    # (m + 1/2 - m_star)*dt away from t_star, which never lands on a cell
    # boundary because the boundaries are integer multiples of dt.
    early = m < vc.m_star
    cell = np.empty(M, dtype=np.int64)
    cell[early] = (vc.m_star - m[early] - 1) // vc.n_early
    cell[~early] = (m[~early] - vc.m_star) // vc.n_late

    early_slices = []
    late_slices = []
    for j in range(I):
        hi = vc.m_star - j * vc.n_early
        early_slices.append(slice(hi - vc.n_early, hi))
        lo = vc.m_star + j * vc.n_late
        late_slices.append(slice(lo, lo + vc.n_late))

    x_bounds = -np.arange(I + 1) * vc.dx
    payoff = PayoffGrid(
        I=I,
        dx=vc.dx,
        boundaries=x_bounds,
        centers=-(np.arange(I) + 0.5) * vc.dx,
        t1=vc.t_star + x_bounds / vc.beta,
        t2=vc.t_star - x_bounds / vc.gamma,
        cell_of_center=cell,
        early_of_center=early,
        early_slices=tuple(early_slices),
        late_slices=tuple(late_slices),
    )
    return time, payoff
