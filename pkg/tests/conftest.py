import numpy as np
import pytest

from spinsel.system import build_spin_system, load_molecule


@pytest.fixture(scope="session")
def coumarin():
    return load_molecule("coumarin")


@pytest.fixture(scope="session")
def furaldehyde():
    return load_molecule("nitrofuraldehyde")


@pytest.fixture(scope="session")
def dibromo():
    return load_molecule("dibromopropionic")


@pytest.fixture(scope="session")
def benzofurazan():
    return load_molecule("benzofurazan")


@pytest.fixture
def two_spin():
    """Textbook A-X pair: +100 Hz and -100 Hz offsets, J = 10 Hz."""
    return build_spin_system({
        "spectrometer": {"1H": 100.0},
        "spins": [{"label": "A", "channel": "1H", "shift_ppm": 1.0},
                  {"label": "X", "channel": "1H", "shift_ppm": -1.0}],
        "couplings": [{"a": "A", "b": "X", "j_hz": 10.0}],
    })


def random_traceless_hermitian(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = (a + a.conj().T) / 2
    return h - np.trace(h) / dim * np.eye(dim)
