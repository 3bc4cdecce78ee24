from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from multirigid.systems import (THUE_MORSE, FixedPoint, FullShift, RotationSystem, SturmianSystem,
                                SubstitutionSystem)

settings.register_profile("ci", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ci")


@pytest.fixture(scope="session")
def tm():
    return SubstitutionSystem(THUE_MORSE)


@pytest.fixture(scope="session")
def tm_point(tm):
    return FixedPoint(tm, "1.0")


@pytest.fixture(scope="session")
def full():
    return FullShift("01")


@pytest.fixture(scope="session")
def rotation():
    return RotationSystem(Fraction(377, 610))


@pytest.fixture(scope="session")
def sturmian():
    return SturmianSystem(Fraction(6765, 10946))
