"""Imaginary densities on the payoff road and the equal-splitting rule."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ValidatedConfig
from .grids import PayoffGrid


@dataclass(frozen=True)
class DensityProfile:
    k: np.ndarray  # (I,) veh/$, index j is the cell at payoff (-(j+1)dx, -j dx]
    kappa: float
    kappa_c: float
    dx: float

    @property
    def mass(self) -> float:
        return float(np.sum(self.k) * self.dx)

    def with_k(self, k: np.ndarray) -> "DensityProfile":
        return DensityProfile(k=k, kappa=self.kappa, kappa_c=self.kappa_c, dx=self.dx)


def density_from_arrivals(g: np.ndarray, payoff: PayoffGrid, vc: ValidatedConfig) -> DensityProfile:
    """Average density per cell: ``(dt/dx)`` times the arrivals in both preimages."""
    g = np.asarray(g, dtype=float)
    sums = np.bincount(payoff.cell_of_center, weights=g, minlength=payoff.I)
    k = sums * (vc.dt / vc.dx)
    return DensityProfile(k=k, kappa=vc.kappa, kappa_c=vc.kappa_c, dx=vc.dx)


def arrivals_from_density(density: DensityProfile, payoff: PayoffGrid, vc: ValidatedConfig) -> np.ndarray:
    """Split each cell's density equally onto its early and late arrival times."""
    return vc.split_coef * density.k[payoff.cell_of_center]
