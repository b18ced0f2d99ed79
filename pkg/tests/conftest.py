import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_unitary(rng, dim: int) -> np.ndarray:
    """Haar-ish random unitary via QR of a complex Gaussian matrix."""
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_state(rng, num_qubits: int) -> np.ndarray:
    z = rng.normal(size=1 << num_qubits) + 1j * rng.normal(size=1 << num_qubits)
    return z / np.linalg.norm(z)
