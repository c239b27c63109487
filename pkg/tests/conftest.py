import os
import sys

import pytest
from hypothesis import HealthCheck, settings

from gluekit.ring.base import BasePair

sys.path.insert(0, os.path.dirname(__file__))

# Randomized suites draw from GLUEKIT_SEED (see gluekit.sampling); hypothesis
# runs derandomized so that a given seed reproduces exactly.
settings.register_profile(
    "gluekit",
    derandomize=True,
    database=None,
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("gluekit")


@pytest.fixture(params=[2, 3, 5, 7], ids=lambda p: f"p{p}")
def prime(request):
    return request.param


@pytest.fixture
def Z5():
    return BasePair.arithmetic(5)


@pytest.fixture
def Qt():
    return BasePair.geometric()
