import numpy as np
import pytest

from rsp7 import TargetState


@pytest.fixture
def rng():
    return np.random.default_rng(20240613)


def random_targets(rng, n, with_phase=True):
    return [TargetState.random(rng, with_phase=with_phase) for _ in range(n)]


def random_density(rng, dim):
    """Random full-rank density matrix via a Wishart draw."""
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho)
