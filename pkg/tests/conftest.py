import numpy as np
import pytest

from qdmlab import data


@pytest.fixture(scope="session")
def demo_digits():
    """Small bundled digit corpus, 28x28 floats in [0, 1]."""
    return data.load_demo_digits()


@pytest.fixture(scope="session")
def demo_digits_raw():
    """Same corpus at its native 8x8 resolution."""
    return data.load_demo_digits(upscale=False)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_state_vector(rng, n_qubits):
    dim = 1 << n_qubits
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)
