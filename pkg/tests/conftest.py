import os

import pytest
from hypothesis import HealthCheck, settings

from causal_unfold import fixtures as fx

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=500, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

GOLDENS = os.path.join(os.path.dirname(__file__), "goldens")


@pytest.fixture
def docs_family():
    return fx.docs().family


@pytest.fixture
def e0_family():
    return fx.e0().family


@pytest.fixture
def appb():
    return fx.appendix_b()


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    lines = test_acceptance.summary_lines()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
