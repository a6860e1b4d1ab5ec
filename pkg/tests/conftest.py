import math

import pytest
from hypothesis import HealthCheck, settings

from conjcount import group as fg
from conjcount.config import load_config
from conjcount.system import GroupSystem

settings.register_profile("default", max_examples=200, deadline=None, derandomize=True,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

LOG3 = math.log(3.0)


@pytest.fixture(scope="session")
def F2():
    return fg.GeneratorSet(2)


@pytest.fixture(scope="session")
def unit_tree(F2):
    return GroupSystem.tree(F2)


@pytest.fixture(scope="session")
def sqrt2_tree(F2):
    return GroupSystem.tree(F2, {0: 1.0, 2: math.sqrt(2.0)})


@pytest.fixture(scope="session")
def schottky():
    return load_config("schottky_pair").system()
