import numpy as np
import pytest

from symdisc.states import from_coefficients


def random_symmetric_set(rng, n, min_modulus=0.0):
    """Random unit coefficients with Dirichlet moduli and uniform phases."""
    while True:
        moduli = rng.dirichlet(np.ones(n))
        if moduli.min() >= min_modulus:
            break
    phases = np.exp(2j * np.pi * rng.random(n))
    return from_coefficients(np.sqrt(moduli) * phases)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
