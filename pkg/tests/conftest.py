import numpy as np
import pytest

from bottleneck_lwr.config import demo_config, validate
from bottleneck_lwr.ctm import StopRule
from bottleneck_lwr.driver import MemorySink, run
from bottleneck_lwr.grids import build_grids
from bottleneck_lwr.profiles import demo_departures


@pytest.fixture(scope="session")
def vc():
    return validate(demo_config())


@pytest.fixture(scope="session")
def grids(vc):
    return build_grids(vc)


@pytest.fixture(scope="session")
def demo_f0(vc, grids):
    return demo_departures(vc, grids[0])


def run_demo(vc, f0, max_days=300.0):
    """The worked example, run until the density stops moving."""
    sink = MemorySink()
    stop = StopRule(max_days=max_days, change_tol=1e-10 * vc.kappa, gap_tol=None)
    summary = run(vc, f0, [sink], stop=stop)
    return summary, sink.records


@pytest.fixture(scope="session")
def demo_run(vc, demo_f0):
    return run_demo(vc, demo_f0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
