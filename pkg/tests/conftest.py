import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "fputw", max_examples=25, deadline=None, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("fputw")


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
