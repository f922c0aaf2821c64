import pytest
from hypothesis import HealthCheck, settings

from gfcalc.kernels import build_pair, classical_pair

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

EXAMPLE_A = (0.5, 0.25, 0.25)


@pytest.fixture(scope="session")
def example_pair():
    """The worked-example kernel, truncated at M = 2."""
    return build_pair(EXAMPLE_A, 0.5, 2)


@pytest.fixture(scope="session")
def half_pair():
    return classical_pair(0.5)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in module.RESULTS:
        terminalreporter.write_line(line)
