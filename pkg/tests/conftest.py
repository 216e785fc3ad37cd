import numpy as np
import pytest

from logineq import CylindricalGrid, GridFunction, RadialGrid


@pytest.fixture(scope="session")
def grid3():
    return RadialGrid.geometric(1e-6, 50.0, 4096, N=3)


@pytest.fixture(scope="session")
def grid4():
    return RadialGrid.geometric(1e-6, 50.0, 4096, N=4)


@pytest.fixture(scope="session")
def gauss3(grid3):
    return GridFunction.from_profile(grid3, lambda s: np.exp(-s**2 / 2.0))


@pytest.fixture(scope="session")
def cyl3():
    return CylindricalGrid.geometric(1e-4, 15.0, 384, N=3)


@pytest.fixture(scope="session")
def cyl_gauss3(cyl3):
    return GridFunction.from_profile(cyl3, lambda r, t: np.exp(-(r**2 + t**2) / 2.0),
                                     kind="cylindrical")


def random_radial_profile(grid, rng, decay=True):
    """Random positive profile: a few log-radius bumps, superfast decay at 0/inf."""
    k = rng.integers(2, 5)
    centers = rng.uniform(-1.0, 1.2, k)
    widths = rng.uniform(0.3, 0.9, k)
    amps = rng.uniform(0.2, 2.0, k)

    def fn(s):
        ls = np.log(np.maximum(s, 1e-300))
        out = np.zeros_like(ls)
        for c, w, a in zip(centers, widths, amps):
            out = out + a * np.exp(-((ls - c) / w) ** 2)
        return out

    return GridFunction.from_profile(grid, fn)
