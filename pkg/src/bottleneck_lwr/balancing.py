"""Departure flows that balance total cost over the jammed interval around t_star."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ValidatedConfig
from .costs import CostProfile, payoff_inverse, scheduling_cost
from .grids import TimeGrid
from .payoff_road import DensityProfile
from .point_queue import FlowProfile, cumulate


class DegenerateRates(ValueError):
    pass


@dataclass(frozen=True)
class JammedInterval:
    jam_cells: int
    x_star: float
    t1_star: float
    t2_star: float


@dataclass(frozen=True)
class BalancedDay:
    jam_cells: int
    x_star: float
    t1_star: float
    t2_star: float
    t_star_switch: float
    flows: FlowProfile
    costs: CostProfile


def detect_jammed_interval(density: DensityProfile, vc: ValidatedConfig) -> JammedInterval:
    """Count the contiguous cells from payoff 0 whose density is within ``jam_tol`` of jam."""
    jammed = density.k >= density.kappa * (1.0 - vc.jam_tol)
    n = len(jammed) if jammed.all() else int(np.argmin(jammed))
    x_star = -n * vc.dx
    t1, t2 = payoff_inverse(x_star, vc)
    return JammedInterval(jam_cells=n, x_star=x_star, t1_star=t1, t2_star=t2)


def switch_time(t1_star: float, vc: ValidatedConfig) -> float:
    """Departure time of the vehicle that arrives exactly at ``t_star``."""
    r = vc.beta / vc.alpha
    return r * t1_star + (1.0 - r) * vc.t_star


def balanced_flows(x_star: float, g: np.ndarray, time: TimeGrid, vc: ValidatedConfig
                   ) -> tuple[FlowProfile, CostProfile, float]:
    """Flows and costs when the cost is held at ``-x_star`` on ``(t1, t2)``.

    Outside the window every vehicle departs when it arrives (``f = g``).
    """
    if vc.beta >= vc.alpha:
        raise DegenerateRates("beta must be < alpha for balanced departures")
    C, a, b, c = vc.C, vc.alpha, vc.beta, vc.gamma
    t1, t2 = payoff_inverse(x_star, vc)
    t_sw = switch_time(t1, vc)
    rate_early = C / (1.0 - b / a)
    rate_late = C / (1.0 + c / a)

    tc, tb = time.centers, time.boundaries
    inside_c = (tc > t1) & (tc < t2)
    f = np.array(g, dtype=float, copy=True)
    f[inside_c & (tc < t_sw)] = rate_early
    f[inside_c & (tc >= t_sw)] = rate_late

    G = cumulate(g, vc.dt)
    F = G.copy()
    inside_b = (tb > t1) & (tb < t2)
    if inside_b.any():
        G1 = np.interp(t1, tb, G)
        G2 = np.interp(t2, tb, G)
        tt = tb[inside_b]
        F[inside_b] = np.minimum(G1 + rate_early * (tt - t1), G2 + rate_late * (tt - t2))

    ups = np.zeros_like(tb)
    early_b = inside_b & (tb <= vc.t_star)
    late_b = inside_b & (tb > vc.t_star)
    ups[early_b] = (b / a) * (tb[early_b] - t1)
    ups[late_b] = (c / a) * (t2 - tb[late_b])

    flows = FlowProfile(f=f, g=np.asarray(g, dtype=float), F=F, G=G, delta=F - G,
                        upsilon=ups, dt=vc.dt)
    phi2 = scheduling_cost(tc, b, c, vc.t_star)
    phi = np.where(inside_c, -x_star, phi2)
    costs = CostProfile(phi1=phi - phi2, phi2=phi2, phi=phi)
    return flows, costs, t_sw


def balance(density: DensityProfile, g: np.ndarray, time: TimeGrid, vc: ValidatedConfig) -> BalancedDay:
    jam = detect_jammed_interval(density, vc)
    flows, costs, t_sw = balanced_flows(jam.x_star, g, time, vc)
    return BalancedDay(
        jam_cells=jam.jam_cells,
        x_star=jam.x_star,
        t1_star=jam.t1_star,
        t2_star=jam.t2_star,
        t_star_switch=t_sw,
        flows=flows,
        costs=costs,
    )
