import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_traceless_hermitian
from spinsel.operators import basis_label, decompose, product_basis, reconstruct, significant

AMX = ("A", "M", "X")


def test_labels_follow_product_operator_convention():
    assert basis_label(("z", "z", "z"), AMX) == "4AzMzXz"
    assert basis_label(("x", "E", "z"), AMX) == "2AxXz"
    assert basis_label(("E", "y", "E"), AMX) == "My"
    assert basis_label(("E", "E", "E"), AMX) == "E"


def test_basis_is_orthogonal_and_complete():
    basis = product_basis(AMX)
    assert len(basis) == 64
    B = np.array([b.ravel() for b in basis.values()])
    gram = B.conj() @ B.T
    assert np.allclose(gram, np.diag(np.diag(gram)))


def test_pseudo_pure_state_decomposition():
    rho = np.diag([1.5, -0.5, -0.5, -0.5, 0.5, 0.5, 0.5, -1.5])
    coeffs = decompose(rho, AMX)
    assert significant(coeffs, 1e-12) == pytest.approx({"Mz": 1.0, "Xz": 1.0, "4AzMzXz": 1.0})


def test_single_spin_z():
    assert significant(decompose(np.diag([0.5, -0.5]), ("A",))) == {"Az": 1.0}


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_decompose_reconstruct_roundtrip(seed):
    rho = random_traceless_hermitian(np.random.default_rng(seed), 8)
    back = reconstruct(decompose(rho, AMX), AMX)
    assert np.abs(back - rho).max() < 1e-10


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(-3, 3))
def test_decompose_is_linear(seed, scale):
    rng = np.random.default_rng(seed)
    a, b = random_traceless_hermitian(rng, 4), random_traceless_hermitian(rng, 4)
    ca, cb = decompose(a, "AX"), decompose(b, "AX")
    cab = decompose(a + scale * b, "AX")
    for k in cab:
        assert cab[k] == pytest.approx(ca[k] + scale * cb[k], abs=1e-10)


def test_errors():
    with pytest.raises(ValueError, match="Hermitian"):
        decompose(np.array([[0, 1], [0, 0]]), ("A",))
    with pytest.raises(ValueError, match="shape"):
        decompose(np.eye(4), ("A",))
    with pytest.raises(KeyError):
        reconstruct({"Qz": 1.0}, ("A",))
