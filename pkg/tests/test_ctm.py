import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from bottleneck_lwr.ctm import StopRule, ctm_step, day_step, fluxes, run_until
from bottleneck_lwr.equilibrium import equilibrium_density
from bottleneck_lwr.payoff_road import DensityProfile

KAPPA = 90.0


def _density(vc, k):
    return DensityProfile(k=np.asarray(k, dtype=float), kappa=vc.kappa, kappa_c=vc.kappa_c, dx=vc.dx)


def test_flux_state_shape_and_boundaries():
    k = np.array([KAPPA, 30.0, 60.0, 0.0])
    fs = fluxes(k, KAPPA, 1.0, 1.0)
    np.testing.assert_allclose(fs.d, [45.0, 30.0, 45.0, 0.0])
    np.testing.assert_allclose(fs.s, [0.0, 45.0, 30.0, 45.0])
    np.testing.assert_allclose(fs.q, [0.0, 0.0, 45.0, 0.0, 0.0])


def test_jammed_block_is_fixed(vc):
    k = equilibrium_density(40.0, vc)
    fs = fluxes(k, vc.kappa, vc.u, vc.w)
    assert np.all(fs.q == 0)
    np.testing.assert_array_equal(ctm_step(k, vc.kappa, vc.u, vc.w, vc.dx, vc.dr), k)


def test_empty_road_stays_empty(vc):
    k = np.zeros(vc.I)
    assert np.all(ctm_step(k, vc.kappa, vc.u, vc.w, vc.dx, vc.dr) == 0)


def test_single_critical_cell_hand_trace():
    # cell -1 at kappa_c = 45 between empty cells; demand 45, downstream supply 45
    k = np.array([0.0, 45.0, 0.0])
    out = ctm_step(k, KAPPA, 1.0, 1.0, 0.5, 0.5)
    np.testing.assert_allclose(out, [45.0, 0.0, 0.0])


def test_min_speed_step_can_overfill():
    # dx/dr = min(u, w) with u < w: the jam side overshoots kappa in one step
    k = np.array([0.75 * KAPPA, 0.75 * KAPPA])
    with pytest.raises(AssertionError):
        ctm_step(k, KAPPA, 0.5, 1.0, 0.5, 1.0)
    # and with u > w the free side goes negative
    k = np.array([0.0, 0.3 * KAPPA])
    with pytest.raises(AssertionError):
        ctm_step(k, KAPPA, 2.0, 1.0, 1.0, 1.0)


def test_cfl_violation_trips_assertion():
    k = np.array([0.0, 45.0, 0.0])
    with pytest.raises(AssertionError):
        ctm_step(k, KAPPA, 1.0, 1.0, 0.5, 1.0)


@settings(max_examples=80, deadline=None)
@given(
    arrays(np.float64, st.integers(2, 60), elements=st.floats(0.0, 1.0)),
    st.floats(0.2, 5.0),
    st.floats(0.2, 5.0),
    st.floats(0.05, 1.0),
)
def test_conservation_bounds_and_tail_property(fracs, u, w, cfl):
    k = fracs * KAPPA
    dx = 0.5
    dr = cfl * dx / max(u, w)
    k1 = ctm_step(k, KAPPA, u, w, dx, dr)
    assert abs(k1.sum() - k.sum()) * dx <= 1e-9 * max(1.0, k.sum() * dx)
    assert np.all((k1 >= 0) & (k1 <= KAPPA))
    assert k1[0] >= k[0]
    q = fluxes(k, KAPPA, u, w).q
    if np.all(q == 0):
        assert np.array_equal(k1, k)
    if np.array_equal(k1, k):
        assert q.max() <= 1e-12 * KAPPA  # only fluxes lost to rounding


def test_run_until_from_equilibrium(vc):
    k = _density(vc, equilibrium_density(40.0, vc))
    traj = run_until(k, vc.u, vc.w, vc.dr, StopRule(max_days=100, change_tol=1e-10 * vc.kappa))
    assert traj.reason == "stationary"
    assert len(traj.densities) == 2
    assert traj.changes[-1] == 0.0


def test_run_until_max_days_reported(vc):
    k = np.zeros(vc.I)
    k[150:160] = 30.0
    traj = run_until(_density(vc, k), vc.u, vc.w, vc.dr, StopRule(max_days=2.0, change_tol=0.0))
    assert traj.reason == "max_days" and not traj.converged
    assert traj.days[-1] == 2.0
    assert len(traj.densities) == 5


def test_run_until_keep_false_keeps_endpoints(vc):
    k = np.zeros(vc.I)
    k[150:160] = 30.0
    traj = run_until(_density(vc, k), vc.u, vc.w, vc.dr, StopRule(max_days=3.0, change_tol=0.0), keep=False)
    assert traj.days == [0.0, 3.0]


def test_run_until_gap_stop(vc):
    k = np.zeros(vc.I)
    k[150:160] = 30.0
    traj = run_until(_density(vc, k), vc.u, vc.w, vc.dr,
                     StopRule(max_days=100, change_tol=0.0, gap_tol=0.5),
                     gap=lambda d: 1.0 if d.k[0] == 0 else 0.0)
    assert traj.reason == "ue_gap"
    assert traj.final.k[0] > 0


def test_demo_trajectory_conserves(vc, demo_run):
    _, records = demo_run
    for r in records:
        assert abs(r.density.mass - vc.N) <= 1e-9 * vc.N
        assert np.all((r.density.k >= 0) & (r.density.k <= vc.kappa))
    tail = [r.density.k[0] for r in records]
    assert np.all(np.diff(tail) >= 0)


def test_day_step_wraps_profile(vc):
    k = _density(vc, equilibrium_density(40.0, vc))
    assert np.array_equal(day_step(k, vc.u, vc.w, vc.dr).k, k.k)
