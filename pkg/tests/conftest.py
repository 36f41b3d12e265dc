import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from orlicz_qig.linalg import operator_norm, random_hermitian
from orlicz_qig.states import gibbs_model

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

DIMS = [2, 4, 8, 16]


def random_model(rng, dim, spread=2.0):
    z = random_hermitian(rng, dim)
    return gibbs_model(spread * z / operator_norm(z))


def random_x(rng, dim, size=1.0):
    z = random_hermitian(rng, dim)
    return size * z / operator_norm(z)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import SUMMARY_LINES
    except ImportError:
        return
    if SUMMARY_LINES:
        terminalreporter.section("acceptance criteria")
        for line in SUMMARY_LINES:
            terminalreporter.write_line(line)
