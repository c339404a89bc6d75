import pytest

from dwfinsler import TangentSample, fixture
from dwfinsler.runspec import fixture_runspec, sample_points


def region(name: str, count: int = 8, seed: int = 7):
    """Deterministic sample points for a built-in fixture."""
    return sample_points(fixture_runspec(name, seed=seed, count=count))


@pytest.fixture(scope="session")
def fix1d():
    return fixture("FIX-1D")


@pytest.fixture(scope="session")
def fixe():
    return fixture("FIX-E")


@pytest.fixture(scope="session")
def fixp():
    return fixture("FIX-P")


@pytest.fixture(scope="session")
def fixr():
    return fixture("FIX-R")


@pytest.fixture(scope="session")
def p1d():
    return TangentSample((0.0,), (1.0,), (1.0,), (1.0,))


@pytest.fixture(scope="session")
def p4():
    """A generic admissible point for the 2+2-dimensional fixtures."""
    return TangentSample((0.4, -0.2), (0.5, 0.3), (1.0, 0.3), (0.2, 1.0))
