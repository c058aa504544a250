"""Full experiment: day-0 point queue, then CTM, splitting and balancing each day."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import Iterable, Optional, Protocol

import numpy as np

from .balancing import balance, detect_jammed_interval
from .config import SimConfig, ValidatedConfig, validate
from .costs import CostProfile, total_costs
from .ctm import StopRule, ctm_step
from .grids import PayoffGrid, TimeGrid, build_grids
from .payoff_road import DensityProfile, arrivals_from_density, density_from_arrivals
from .point_queue import FlowProfile, propagate_queue

log = logging.getLogger(__name__)

USED_FRACTION = 1e-6  # g > USED_FRACTION*C marks an arrival interval as used


class MassMismatchWarning(UserWarning):
    pass


@dataclass(frozen=True)
class DayRecord:
    step: int
    day: float
    density: DensityProfile
    flows: FlowProfile
    costs: CostProfile
    x_star: float
    jam_cells: int
    mass: float
    ue_gap: float
    max_density_change: float


class Sink(Protocol):
    def emit(self, record: DayRecord) -> None: ...

    def close(self) -> None: ...


class MemorySink:
    """Keeps every record; meant for tests and small runs."""

    def __init__(self) -> None:
        self.records: list[DayRecord] = []

    def emit(self, record: DayRecord) -> None:
        self.records.append(record)

    def close(self) -> None:
        pass


@dataclass(frozen=True)
class RunSummary:
    converged: bool
    convergence_day: Optional[float]
    final_day: float
    final_gap: float
    final_x_star: float
    initial_gap: float
    stop_reason: str
    n_days: int


def ue_gap(g: np.ndarray, phi: np.ndarray, dt: float, N: float, dx: float, C: float) -> float:
    """Demand-weighted excess cost over the cheapest used arrival interval, scale free."""
    used = g > USED_FRACTION * C
    if not used.any():
        return 0.0
    phi_min = float(phi[used].min())
    excess = float(np.sum(g[used] * dt * (phi[used] - phi_min)))
    return excess / (N * max(phi_min, dx))


def build_initial_day(f0: np.ndarray, vc: ValidatedConfig, time: TimeGrid, payoff: PayoffGrid) -> DayRecord:
    flows = propagate_queue(f0, vc.C, vc.dt, M=vc.M)
    costs = total_costs(flows, time.centers, vc)
    density = density_from_arrivals(flows.g, payoff, vc)
    mass = density.mass
    if abs(mass - vc.N) > 1e-9 * vc.N:
        warnings.warn(
            f"initial departures carry {mass:.6g} vehicles but N = {vc.N:.6g}",
            MassMismatchWarning,
            stacklevel=2,
        )
    jam = detect_jammed_interval(density, vc)
    return DayRecord(
        step=0,
        day=0.0,
        density=density,
        flows=flows,
        costs=costs,
        x_star=jam.x_star,
        jam_cells=jam.jam_cells,
        mass=mass,
        ue_gap=ue_gap(flows.g, costs.phi, vc.dt, vc.N, vc.dx, vc.C),
        max_density_change=float("nan"),
    )


def next_day(prev: DayRecord, vc: ValidatedConfig, time: TimeGrid, payoff: PayoffGrid) -> DayRecord:
    k = ctm_step(prev.density.k, vc.kappa, vc.u, vc.w, vc.dx, vc.dr)
    density = prev.density.with_k(k)
    g = arrivals_from_density(density, payoff, vc)
    bal = balance(density, g, time, vc)
    return DayRecord(
        step=prev.step + 1,
        day=(prev.step + 1) * vc.dr,
        density=density,
        flows=bal.flows,
        costs=bal.costs,
        x_star=bal.x_star,
        jam_cells=bal.jam_cells,
        mass=density.mass,
        ue_gap=ue_gap(g, bal.costs.phi, vc.dt, vc.N, vc.dx, vc.C),
        max_density_change=float(np.max(np.abs(k - prev.density.k))),
    )


def run(
    config: SimConfig | ValidatedConfig,
    f0: np.ndarray,
    sinks: Iterable[Sink] = (),
    stop: StopRule | None = None,
) -> RunSummary:
    """Simulate from departure rates ``f0`` until the stop rule fires.

    The default stop rule uses the config's ``ue_gap_tol`` and ``max_days``.
    ``RunSummary.convergence_day`` is the first day the gap falls below
    ``ue_gap_tol`` whatever rule ends the run.
    """
    vc = config if isinstance(config, ValidatedConfig) else validate(config)
    time, payoff = build_grids(vc)
    stop = stop or StopRule.for_config(vc)
    sinks = list(sinks)

    rec = build_initial_day(np.asarray(f0, dtype=float), vc, time, payoff)
    initial_gap = rec.ue_gap
    for s in sinks:
        s.emit(rec)
    conv_day = rec.day if rec.ue_gap < vc.ue_gap_tol else None
    reason = stop.reason(None, rec.ue_gap)
    n = 1
    if reason is None:
        reason = "max_days"
        for _ in range(stop.max_steps(vc.dr)):
            rec = next_day(rec, vc, time, payoff)
            n += 1
            for s in sinks:
                s.emit(rec)
            if conv_day is None and rec.ue_gap < vc.ue_gap_tol:
                conv_day = rec.day
            why = stop.reason(rec.max_density_change, rec.ue_gap)
            if why is not None:
                reason = why
                break
    for s in sinks:
        s.close()
    if conv_day is None:
        log.warning("no convergence: UE gap %.3g after %g days", rec.ue_gap, rec.day)
    return RunSummary(
        converged=conv_day is not None,
        convergence_day=conv_day,
        final_day=rec.day,
        final_gap=rec.ue_gap,
        final_x_star=rec.x_star,
        initial_gap=initial_gap,
        stop_reason=reason,
        n_days=n,
    )
