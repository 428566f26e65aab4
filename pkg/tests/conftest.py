import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from bohmspin.guidance import SpinVector
from bohmspin.wavefunction import PhysicalConstants, WaveModel

settings.register_profile("repo", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


@pytest.fixture
def constants():
    return PhysicalConstants()


@pytest.fixture
def spin():
    return SpinVector.up()


@pytest.fixture
def gaussian():
    return WaveModel.gaussian(1.0)


@pytest.fixture
def product():
    return WaveModel.gaussian((2.0, 1.0))


@pytest.fixture
def pair():
    return WaveModel.superposition(5.0, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    lines = getattr(mod, "LINES", {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for n in sorted(lines):
            terminalreporter.write_line(lines[n])
