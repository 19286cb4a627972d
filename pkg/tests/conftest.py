import numpy as np
import pytest

from belltomo.polarimetry import build_measurement_set


@pytest.fixture(scope="session")
def mset():
    return build_measurement_set()


def haar_unitary(rng, dim):
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_density(rng, dim=4, rank=None):
    """Random density matrix, full rank unless a lower rank is requested."""
    g = rng.normal(size=(dim, rank or dim)) + 1j * rng.normal(size=(dim, rank or dim))
    m = g @ g.conj().T
    return m / np.trace(m).real
