from __future__ import annotations

import numpy as np
import pytest

from annulab import kernels
from annulab.grid import make_grid
from annulab.surfaces import default_grid, sample_catalog

BACKENDS = sorted(kernels.backends())


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    """Run the test once per available banded-solver implementation."""
    mod = kernels.backends()[request.param]
    monkeypatch.setattr(kernels, "solve_tridiagonal", mod.solve_tridiagonal)
    monkeypatch.setattr(kernels, "solve_pentadiagonal", mod.solve_pentadiagonal)
    return request.param


@pytest.fixture(scope="session")
def grid12():
    return make_grid(1.0, 2.0, 128, 256)


@pytest.fixture(scope="session")
def small_grid():
    return make_grid(1.0, 2.0, 33, 64)


@pytest.fixture(scope="session")
def catenoid():
    return sample_catalog("catenoid", params={"h": 0.5})


@pytest.fixture(scope="session")
def flat():
    return sample_catalog("flat")


@pytest.fixture(scope="session")
def enneper():
    return sample_catalog("enneper")


@pytest.fixture(scope="session")
def log_cylinder():
    return sample_catalog("log_cylinder")


@pytest.fixture(scope="session")
def thin_catenoid():
    return sample_catalog("catenoid", default_grid("catenoid", {"h": 0.01}), {"h": 0.01})


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
