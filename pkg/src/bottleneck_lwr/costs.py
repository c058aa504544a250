"""Scheduling, queueing and total costs, and the payoff/time transform."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ValidatedConfig
from .point_queue import FlowProfile


class OutOfRange(ValueError):
    pass


@dataclass(frozen=True)
class CostProfile:
    phi1: np.ndarray  # queueing cost at each interval center
    phi2: np.ndarray  # scheduling cost at each interval center
    phi: np.ndarray  # total cost


def scheduling_cost(t, beta: float, gamma: float, t_star: float):
    t = np.asarray(t, dtype=float)
    out = beta * np.maximum(t_star - t, 0.0) + gamma * np.maximum(t - t_star, 0.0)
    return out if out.ndim else float(out)


def total_costs(profile: FlowProfile, centers: np.ndarray, vc: ValidatedConfig) -> CostProfile:
    """Costs at interval centers; the queueing time there is the mean of its two boundaries."""
    ups = profile.at_centers(profile.upsilon)
    phi1 = vc.alpha * ups
    phi2 = scheduling_cost(centers, vc.beta, vc.gamma, vc.t_star)
    return CostProfile(phi1=phi1, phi2=phi2, phi=phi1 + phi2)


def payoff_inverse(x: float, vc: ValidatedConfig) -> tuple[float, float]:
    """The early and late arrival times whose scheduling cost is ``-x``."""
    if not (-vc.L * (1 + 1e-12) <= x <= 0.0):
        raise OutOfRange(f"payoff {x!r} outside [-{vc.L}, 0]")
    return vc.t_star + x / vc.beta, vc.t_star - x / vc.gamma
