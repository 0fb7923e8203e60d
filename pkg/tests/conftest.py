import numpy as np
import pytest

from absbm.core import DriftParams
from absbm import mcoracle


@pytest.fixture(scope="session")
def zero_table():
    from absbm import specfun

    return specfun.airy_ai_prime_zeros(50)


@pytest.fixture(scope="session")
def mc_mu0():
    """Moderate-size driftless sample shared across tests (seeded)."""
    cfg = mcoracle.SimConfig(n_paths=60_000, n_steps=2048, seed=90125)
    return mcoracle.simulate(DriftParams(0.0), cfg)


@pytest.fixture(scope="session")
def mc_mu1():
    cfg = mcoracle.SimConfig(n_paths=60_000, n_steps=2048, seed=90125)
    return mcoracle.simulate(DriftParams(1.0), cfg)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20230915)
