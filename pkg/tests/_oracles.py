"""Independent reference constructions used by the tests.

Nothing here goes through the package's sparse ladder code: the Fock space
over ``C^d`` is embedded in the tensor product of ``d`` single-mode spaces
and the ladder operators are built with ``np.kron``.
"""
from __future__ import annotations

from functools import reduce

import numpy as np
import scipy.linalg as sla


def single_mode_lowering(cut: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, cut + 1, dtype=float)), k=1)


def kron_lowering(d: int, n_max: int, eps: float) -> list[np.ndarray]:
    """``sqrt(eps) a_j`` on ``(C^{n_max+1})^{(x)d}``."""
    c = np.sqrt(eps) * single_mode_lowering(n_max)
    eye = np.eye(n_max + 1)
    return [reduce(np.kron, [c if i == j else eye for i in range(d)]) for j in range(d)]


def kron_projector(space) -> np.ndarray:
    """Rows select the occupation basis of ``space`` inside the tensor product."""
    d, m = space.d, space.n_max + 1
    idx = np.zeros(space.dim, dtype=int)
    for j in range(d):
        idx = idx * m + space.basis[:, j]
    P = np.zeros((space.dim, m ** d))
    P[np.arange(space.dim), idx] = 1.0
    return P


def kron_wick(space, b) -> np.ndarray:
    """``sum c (a^*)^beta a^gamma`` restricted to ``space`` (dense)."""
    a = kron_lowering(space.d, space.n_max, space.epsilon)
    ad = [x.conj().T for x in a]
    N = a[0].shape[0]
    out = np.zeros((N, N), dtype=complex)
    for (beta, gamma), c in b.terms.items():
        term = np.eye(N, dtype=complex)
        for j in range(space.d):
            term = term @ np.linalg.matrix_power(ad[j], beta[j])
        for j in range(space.d):
            term = term @ np.linalg.matrix_power(a[j], gamma[j])
        out += c * term
    P = kron_projector(space)
    return P @ out @ P.T


def kron_field(space, f) -> np.ndarray:
    """``(a^*(f) + a(f)) / sqrt(2)`` restricted to ``space``."""
    a = kron_lowering(space.d, space.n_max, space.epsilon)
    af = sum(np.conj(fj) * aj for fj, aj in zip(np.atleast_1d(f), a))
    P = kron_projector(space)
    A = P @ af @ P.T
    return (A + A.conj().T) / np.sqrt(2)


def dense_weyl(space, f) -> np.ndarray:
    return sla.expm(1j * kron_field(space, f))


def coherent_coeffs(space, z) -> np.ndarray:
    """``E(z)`` coefficients from the product formula over modes."""
    from math import factorial
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    eps = space.epsilon
    out = np.empty(space.dim, dtype=complex)
    for i, alpha in enumerate(space.basis):
        v = np.exp(-np.vdot(z, z).real / (2 * eps))
        for j, aj in enumerate(alpha):
            v *= (z[j] / np.sqrt(eps)) ** int(aj) / np.sqrt(float(factorial(int(aj))))
        out[i] = v
    return out
