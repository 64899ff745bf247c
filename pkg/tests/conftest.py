import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite",
    derandomize=True,
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def validation_report():
    """One shared run of the full solver validation battery (about a
    minute); several modules assert against different slices of it."""
    from sglab.validation import run_solver_validation

    return run_solver_validation()


def grid_1d(half_width: float = 24.0, n: int = 4096):
    """Uniform midpoint-free grid wide enough for every packet in the suite."""
    x = np.linspace(-half_width, half_width, n)
    return x, x[1] - x[0]


def l2_norm(values: np.ndarray, dx: float) -> float:
    return math.sqrt(float((np.abs(values) ** 2).sum() * dx))
