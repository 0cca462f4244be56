"""Product-operator expansion of deviation density matrices."""

from __future__ import annotations

from functools import reduce
from itertools import product

import numpy as np

from .system import SIGMA

AXES = ("E", "x", "y", "z")


def basis_label(word: tuple[str, ...], labels) -> str:
    """Conventional label for a product-operator word, e.g. ``4AzMzXz``."""
    active = [(lab, ax) for lab, ax in zip(labels, word) if ax != "E"]
    if not active:
        return "E"
    prefix = "" if len(active) == 1 else str(2 ** (len(active) - 1))
    return prefix + "".join(f"{lab}{ax}" for lab, ax in active)


def basis_operator(word: tuple[str, ...]) -> np.ndarray:
    """``2^(k-1) * I_1a (x) I_2b (x) ...`` with k non-identity factors."""
    k = sum(ax != "E" for ax in word)
    scale = 2.0 ** (k - 1) if k else 1.0
    return scale * reduce(np.kron, [SIGMA[ax] for ax in word])


def product_basis(labels) -> dict[str, np.ndarray]:
    """All 4^N product operators keyed by label, identity first."""
    n = len(labels)
    return {basis_label(w, labels): basis_operator(w) for w in product(AXES, repeat=n)}


def label_words(labels) -> dict[str, tuple[str, ...]]:
    """Map each product-operator label to its per-spin axis word."""
    return {basis_label(w, labels): w for w in product(AXES, repeat=len(labels))}


def decompose(rho: np.ndarray, labels, tol: float = 1e-12) -> dict[str, float]:
    """Real coefficients of a Hermitian matrix in the product-operator basis.

    Every label is present in the result, including ``"E"``; use
    :func:`significant` to drop the zeros.
    """
    rho = np.asarray(rho, dtype=complex)
    n = len(labels)
    if rho.shape != (2 ** n, 2 ** n):
        raise ValueError(f"matrix shape {rho.shape} does not match {n} spins")
    scale = max(1.0, float(np.abs(rho).max(initial=0.0)))
    if np.abs(rho - rho.conj().T).max() > tol * scale:
        raise ValueError("product-operator expansion needs a Hermitian matrix")
    out = {}
    for label, B in product_basis(labels).items():
        # basis operators are Hermitian and mutually orthogonal
        out[label] = float(np.real(np.vdot(B, rho)) / np.real(np.vdot(B, B)))
    return out


def reconstruct(coefficients: dict[str, float], labels) -> np.ndarray:
    basis = product_basis(labels)
    n = len(labels)
    rho = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for label, c in coefficients.items():
        try:
            rho += c * basis[label]
        except KeyError:
            raise KeyError(f"unknown product operator {label!r}") from None
    return rho


def significant(coefficients: dict[str, float], tol: float = 1e-10) -> dict[str, float]:
    return {k: v for k, v in coefficients.items() if abs(v) > tol}
