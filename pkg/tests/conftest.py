import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE: dict = {}


@pytest.fixture(scope="session")
def cyl():
    from fiberint.examples import cylinder

    return cylinder("up")


@pytest.fixture(scope="session")
def cyl_down():
    from fiberint.examples import cylinder

    return cylinder("down")


@pytest.fixture(scope="session")
def tor():
    from fiberint.examples import torus

    return torus()


@pytest.fixture(scope="session")
def circ():
    from fiberint.examples import circle

    return circle()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
