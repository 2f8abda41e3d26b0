import pytest
from hypothesis import HealthCheck, settings

from cartanmod.dpa import Shape
from cartanmod.field import get_field

settings.register_profile(
    "repo", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")


def shape_of(p, n, k=1):
    return Shape(get_field(p, k), n)


@pytest.fixture
def f5():
    return get_field(5)


@pytest.fixture
def f25():
    return get_field(5, 2)
