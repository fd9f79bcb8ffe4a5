import math

import pytest
from hypothesis import HealthCheck, settings

from grw_reapers.warping import make_warping

settings.register_profile(
    "repo",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

QUARTER = math.pi / 4


@pytest.fixture(scope="session")
def w2_11():
    return make_warping("II", 1, 1)


@pytest.fixture(scope="session")
def w2_12():
    return make_warping("II", 1, 2)


@pytest.fixture(scope="session")
def w3_12():
    return make_warping("III", 1, 2)
