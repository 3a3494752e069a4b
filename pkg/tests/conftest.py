import pytest

from warpstab import WarpedSpace


@pytest.fixture(scope="session")
def hyperbolic():
    """Hyperbolic base, g = 1 - 2t^2, f = -2t^2 (stable minimal slice at 0)."""
    return WarpedSpace.from_strings(-1, "1 - 2*t^2", "-2*t^2", -0.45, 0.45)


@pytest.fixture(scope="session")
def exp_sphere():
    """Spherical base, g = e^t, f = t^2 (minimal slice at 1/2)."""
    return WarpedSpace.from_strings(1, "exp(t)", "t^2", -5.0, 5.0)


@pytest.fixture(scope="session")
def flat():
    return WarpedSpace.from_strings(0, "1", "0", -1.0, 1.0)


@pytest.fixture(scope="session")
def cylinder():
    return WarpedSpace.from_strings(1, "1", "0", -1.0, 1.0)


@pytest.fixture(scope="session")
def round_sphere():
    return WarpedSpace.from_strings(1, "sin(t)^2", "0", 0.2, 2.94)
