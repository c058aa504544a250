"""Analytic equilibrium, user-equilibrium checks and the two-cell stability experiment."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .balancing import balanced_flows
from .config import ValidatedConfig
from .costs import CostProfile, payoff_inverse
from .ctm import ctm_step
from .grids import PayoffGrid, TimeGrid
from .payoff_road import DensityProfile, arrivals_from_density
from .point_queue import FlowProfile


class PerturbationTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class SpueSolution:
    L_star: float
    window: tuple[float, float]
    cost: float
    switch_time: float
    rate_early: float
    rate_late: float
    k_star: DensityProfile
    flows: FlowProfile
    costs: CostProfile

    @property
    def f_star(self) -> np.ndarray:
        return self.flows.f

    @property
    def g_star(self) -> np.ndarray:
        return self.flows.g


def equilibrium_density(L_star: float, vc: ValidatedConfig) -> np.ndarray:
    """Jam density on ``[-L_star, 0]``; a partial last cell keeps the mass exact."""
    k = np.zeros(vc.I)
    full, rest = divmod(L_star / vc.dx, 1.0)
    full = int(full)
    if rest > 1.0 - 1e-9:
        full, rest = full + 1, 0.0
    elif rest < 1e-9:
        rest = 0.0
    k[:full] = vc.kappa
    if rest and full < vc.I:
        k[full] = rest * vc.kappa
    return k


def analytic_spue(vc: ValidatedConfig, time: TimeGrid, payoff: PayoffGrid) -> SpueSolution:
    L_star = vc.N / vc.kappa
    t1, t2 = payoff_inverse(-L_star, vc)
    density = DensityProfile(k=equilibrium_density(L_star, vc), kappa=vc.kappa,
                             kappa_c=vc.kappa_c, dx=vc.dx)
    g = arrivals_from_density(density, payoff, vc)
    flows, costs, t_sw = balanced_flows(-L_star, g, time, vc)
    return SpueSolution(
        L_star=L_star,
        window=(t1, t2),
        cost=L_star,
        switch_time=t_sw,
        rate_early=vc.C / (1.0 - vc.beta / vc.alpha),
        rate_late=vc.C / (1.0 + vc.gamma / vc.alpha),
        k_star=density,
        flows=flows,
        costs=costs,
    )


@dataclass(frozen=True)
class UeReport:
    phi_star: float
    atue_residual: float
    dtue_residual: float
    unused_min_excess: float
    tol: float

    @property
    def atue(self) -> bool:
        return self.atue_residual <= self.tol

    @property
    def dtue(self) -> bool:
        return self.dtue_residual <= self.tol

    @property
    def unused_ok(self) -> bool:
        return self.unused_min_excess >= -self.tol

    @property
    def holds(self) -> bool:
        return self.atue and self.dtue and self.unused_ok


def check_ue(flows: FlowProfile, costs: CostProfile, centers: np.ndarray, C: float, tol: float,
             used_fraction: float = 1e-6) -> UeReport:
    """Residuals of the arrival-time and departure-time equilibrium conditions.

    The departure-time residual maps each used departure interval to its
    arrival time ``t + delta/C`` and samples the total cost there by linear
    interpolation between interval centers.
    """
    phi = costs.phi
    used_arr = flows.g > used_fraction * C
    if not used_arr.any():
        return UeReport(0.0, 0.0, 0.0, math.inf, tol)
    phi_star = float(phi[used_arr].min())
    atue = float(phi[used_arr].max() - phi_star)

    used_dep = flows.f > used_fraction * C
    if used_dep.any():
        arrive = centers[used_dep] + flows.at_centers(flows.delta)[used_dep] / C
        dtue = float(np.max(np.interp(arrive, centers, phi)) - phi_star)
    else:
        dtue = 0.0
    unused = ~used_arr
    unused_min = float((phi[unused] - phi_star).min()) if unused.any() else math.inf
    return UeReport(phi_star, atue, dtue, unused_min, tol)


@dataclass(frozen=True)
class PerturbationResult:
    epsilon0: float
    L_star: float
    decay_rate_theory: float
    decay_rate_fit: float
    r_squared: float
    days: np.ndarray
    epsilon: np.ndarray  # coarse-cell CTM trajectory of the upstream cell's density
    epsilon_theory: np.ndarray
    fine_initial_rate: float  # same set-up on the configured cell size, first-step rate

    def within(self, rel: float = 0.1) -> bool:
        return abs(self.decay_rate_fit - self.decay_rate_theory) <= rel * self.decay_rate_theory


def epsilon_closed_form(r, epsilon0: float, L_star: float, u: float, w: float):
    return epsilon0 * np.exp(-min(u, w) * np.asarray(r, dtype=float) / L_star)


def _log_fit(days: np.ndarray, eps: np.ndarray) -> tuple[float, float]:
    keep = eps > 0
    x, y = days[keep], np.log(eps[keep])
    slope, icpt = np.polyfit(x, y, 1)
    resid = y - (slope * x + icpt)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return -float(slope), r2


def perturbation_experiment(vc: ValidatedConfig, epsilon0: float, horizon: float | None = None
                            ) -> PerturbationResult:
    """Perturb the equilibrium by moving ``epsilon0`` of jam density one cell upstream.

    Cells have size ``L_star``: cell 0 starts at ``kappa - epsilon0``, cell -1
    at ``epsilon0`` and cell -2 is empty. The same initial state on the
    configured cell size gives ``fine_initial_rate``.
    """
    if epsilon0 < 0:
        raise PerturbationTooLarge("epsilon0 must be nonnegative")
    if epsilon0 > 0.1 * vc.kappa_c:
        raise PerturbationTooLarge(
            f"epsilon0={epsilon0!r} exceeds 0.1*kappa_c={0.1 * vc.kappa_c!r}"
        )
    L_star = vc.N / vc.kappa
    vmin = min(vc.u, vc.w)
    theory = vmin / L_star
    if horizon is None:
        horizon = 3.0 / theory
    n_steps = int(math.ceil(horizon / vc.dr))
    days = np.arange(n_steps + 1) * vc.dr

    k = np.array([vc.kappa - epsilon0, epsilon0, 0.0])
    eps = np.empty(n_steps + 1)
    eps[0] = epsilon0
    for n in range(1, n_steps + 1):
        k = ctm_step(k, vc.kappa, vc.u, vc.w, L_star, vc.dr)
        eps[n] = k[1]

    if epsilon0 > 0:
        fit, r2 = _log_fit(days, eps)
        per = int(round(L_star / vc.dx))
        fine = np.zeros(3 * per)
        fine[:per] = vc.kappa - epsilon0
        fine[per:2 * per] = epsilon0
        fine = ctm_step(fine, vc.kappa, vc.u, vc.w, vc.dx, vc.dr)
        eps_fine = float(np.mean(fine[per:2 * per]))
        fine_rate = -math.log(eps_fine / epsilon0) / vc.dr
    else:
        fit, r2, fine_rate = 0.0, 1.0, 0.0

    return PerturbationResult(
        epsilon0=epsilon0,
        L_star=L_star,
        decay_rate_theory=theory,
        decay_rate_fit=fit,
        r_squared=r2,
        days=days,
        epsilon=eps,
        epsilon_theory=epsilon_closed_form(days, epsilon0, L_star, vc.u, vc.w),
        fine_initial_rate=fine_rate,
    )
