import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from reidemeister import models
from reidemeister.diagram import parse_gauss

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

TREFOIL_CODE = "O1- U2- O3- U1- O2- U3-"
FIGURE_EIGHT_CODE = "O1- U2- O3+ U4+ O2- U1- O4+ U3+"


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def trefoil():
    return models.trefoil()


@pytest.fixture(scope="session")
def trefoil_diagram():
    return parse_gauss(TREFOIL_CODE)


@pytest.fixture(scope="session")
def figure_eight_diagram():
    return parse_gauss(FIGURE_EIGHT_CODE)


ACCEPTANCE = {}  # criterion number -> (ok, title, seconds, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, title, secs, detail = ACCEPTANCE[n]
        line = f"criterion {n} {'PASS' if ok else 'FAIL'} {title} ({secs:.1f} s)"
        terminalreporter.write_line(line + (f" {detail}" if detail else ""))
