import numpy as np
import pytest

from bottleneck_lwr.config import demo_config, validate
from bottleneck_lwr.ctm import StopRule
from bottleneck_lwr.driver import MassMismatchWarning, MemorySink, build_initial_day, run, ue_gap
from bottleneck_lwr.equilibrium import analytic_spue
from bottleneck_lwr.grids import build_grids
from bottleneck_lwr.profiles import demo_departures

from conftest import run_demo


def test_ue_gap_hand_value():
    C = 100.0
    g = np.array([C, C, 0.0])
    phi = np.array([10.0, 20.0, 30.0])
    # used: first two; excess = C*1*(20-10); normalizer N*max(10, dx)
    assert ue_gap(g, phi, 1.0, 2 * C, 0.5, C) == pytest.approx(C * 10 / (2 * C * 10))
    assert ue_gap(np.zeros(3), phi, 1.0, 1.0, 0.5, C) == 0.0


def test_ue_gap_ignores_dust():
    C = 100.0
    g = np.array([C, 1e-7 * C])
    assert ue_gap(g, np.array([5.0, 50.0]), 1.0, C, 0.5, C) == 0.0


def test_initial_day_demo(vc, grids, demo_f0):
    time, payoff = grids
    rec = build_initial_day(demo_f0, vc, time, payoff)
    assert rec.step == 0 and rec.day == 0.0
    assert rec.mass == pytest.approx(3600.0, rel=1e-12)
    assert rec.ue_gap > 1.0
    assert rec.x_star == -7.5


def test_initial_day_zero_departures(vc, grids):
    time, payoff = grids
    with pytest.warns(MassMismatchWarning):
        rec = build_initial_day(np.zeros(vc.M), vc, time, payoff)
    assert rec.mass == 0.0
    assert np.all(rec.density.k == 0) and np.all(rec.flows.g == 0)
    assert rec.ue_gap == 0.0


def test_initial_day_at_equilibrium(vc, grids):
    time, payoff = grids
    sol = analytic_spue(vc, time, payoff)
    rec = build_initial_day(sol.f_star, vc, time, payoff)
    assert rec.ue_gap <= vc.ue_gap_tol
    np.testing.assert_allclose(rec.density.k, sol.k_star.k, atol=1e-6)


def test_run_from_equilibrium_converges_on_day_zero(vc, grids):
    time, payoff = grids
    sol = analytic_spue(vc, time, payoff)
    sink = MemorySink()
    summary = run(vc, sol.f_star, [sink])
    assert summary.converged and summary.convergence_day == 0.0
    assert summary.n_days == 1 and len(sink.records) == 1
    assert summary.stop_reason == "ue_gap"


def test_halved_demand():
    vc = validate(demo_config().replace(N=1800.0))
    time, _ = build_grids(vc)
    f0 = 0.5 * demo_departures(vc, time)
    summary, records = run_demo(vc, f0)
    assert summary.final_x_star == -20.0 == -vc.N / vc.kappa
    assert records[-1].density.mass == pytest.approx(1800.0, rel=1e-12)


def test_no_convergence_reported(vc, demo_f0):
    summary = run(vc, demo_f0, [], stop=StopRule(max_days=5.0, change_tol=0.0, gap_tol=vc.ue_gap_tol))
    assert not summary.converged
    assert summary.stop_reason == "max_days"
    assert summary.final_day == 5.0
    assert summary.n_days == 11


def test_determinism(vc, demo_f0):
    _, a = run_demo(vc, demo_f0, max_days=20.0)
    _, b = run_demo(vc, demo_f0, max_days=20.0)
    assert len(a) == len(b)
    for ra, rb in zip(a, b):
        assert np.array_equal(ra.density.k, rb.density.k)
        assert np.array_equal(ra.flows.F, rb.flows.F)
        assert np.array_equal(ra.costs.phi, rb.costs.phi)
        assert ra.ue_gap == rb.ue_gap


def test_demo_gap_endpoint(demo_run):
    _, records = demo_run
    assert records[-1].ue_gap <= records[0].ue_gap


def test_mass_every_day(vc, demo_run):
    _, records = demo_run
    m0 = records[0].mass
    assert all(abs(r.mass - m0) <= 1e-9 * vc.N for r in records)


def test_underused_times_are_never_undercut(vc, grids, demo_run):
    # g(t1) < C and phi2(t2) >= phi2(t1) imply phi(t2) >= phi(t1), every day
    time, _ = grids
    _, records = demo_run
    slack = vc.alpha * vc.dt
    for r in records[::5]:
        phi, phi2 = r.costs.phi, r.costs.phi2
        order = np.argsort(phi2, kind="stable")
        # suffix minimum of phi over times with at least this scheduling cost
        suffix_min = np.minimum.accumulate(phi[order][::-1])[::-1]
        first_ge = np.searchsorted(phi2[order], phi2, side="left")
        under = r.flows.g < vc.C * (1 - 1e-9)
        assert np.all(suffix_min[first_ge[under]] >= phi[under] - slack)


def test_record_fields_consistent(vc, demo_run):
    _, records = demo_run
    for r in records[1::7]:
        np.testing.assert_allclose(r.costs.phi, r.costs.phi1 + r.costs.phi2)
        assert np.all(r.costs.phi1 >= -1e-9)
        np.testing.assert_allclose(r.flows.delta, r.flows.F - r.flows.G)
        assert r.max_density_change >= 0
