"""Weyl and Anti-Wick quantization of trigonometric symbols.

A trigonometric symbol is a finite sum ``b(z) = sum_m c_m exp(2 pi i S(z, xi_m))``
with ``S(u, v) = Re <u, v>``.  Its Weyl quantization is the finite sum
``sum_m c_m W(sqrt(2) pi xi_m)`` and its Anti-Wick quantization carries the
extra factor ``exp(-eps pi^2 |xi_m|^2 / 2)``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import factorial

import numpy as np
from numpy.polynomial.hermite import hermgauss

from .fock import (DenseOperator, FockSpace, GuardError, _coeffs,
                   weyl_apply, weyl_operator)
from .special import hermite_coefficients, laguerre_l
from .symbols import PolySymbol, bounded_compositions, wick_quantize

WEYL_TOL = 1e-20


def real_inner(u, v) -> float:
    """``S(u, v) = Re <u, v>``."""
    return float(np.real(np.vdot(u, v)))


def symplectic(u, v) -> float:
    """``sigma(u, v) = Im <u, v>``."""
    return float(np.imag(np.vdot(u, v)))


# ----------------------------------------------------------------------
# Fourier-Wigner transform and the Laguerre closed form


def fourier_wigner(space: FockSpace, phi, psi, xi, tol: float | None = WEYL_TOL) -> complex:
    """``V[phi, psi](xi) = <psi, W(sqrt(2) pi xi) phi>``."""
    xi = np.atleast_1d(np.asarray(xi, dtype=complex))
    w_phi = weyl_apply(space, np.sqrt(2) * np.pi * xi, _coeffs(phi), tol=tol)
    return complex(np.vdot(_coeffs(psi), w_phi))


def laguerre_vw(k: int, j: int, z, xi, epsilon: float) -> complex:
    """Closed form of ``V[z^{(x)k}, z^{(x)j}](xi)`` for ``|z| = 1``.

    With ``eta = pi sqrt(eps) xi`` and ``w = <eta, z>`` the value is
    ``i^{k-j} sqrt(j!/k!) L_j^{(k-j)}(|w|^2) w^{k-j} exp(-|eta|^2/2)`` for
    ``k >= j`` and ``i^{j-k} sqrt(k!/j!) L_k^{(j-k)}(|w|^2) conj(w)^{j-k}
    exp(-|eta|^2/2)`` for ``j >= k``.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if abs(np.linalg.norm(z) - 1) > 1e-12:
        raise ValueError("the closed form needs |z| = 1")
    eta = np.pi * np.sqrt(epsilon) * np.atleast_1d(np.asarray(xi, dtype=complex))
    w = complex(np.vdot(eta, z))
    gauss = np.exp(-np.vdot(eta, eta).real / 2)
    if k >= j:
        lo, hi, power = j, k, w ** (k - j)
    else:
        lo, hi, power = k, j, np.conj(w) ** (j - k)
    ratio = np.exp(0.5 * (np.sum(np.log(np.arange(1, lo + 1))) - np.sum(np.log(np.arange(1, hi + 1)))))
    return complex(1j ** (hi - lo) * ratio * laguerre_l(lo, hi - lo, abs(w) ** 2) * power * gauss)


# ----------------------------------------------------------------------
# trigonometric symbols


@dataclass(frozen=True)
class TrigSymbol:
    """``b(z) = sum_m c_m exp(2 pi i S(z, xi_m))``.

    Attributes
    ----------
    coeffs : ndarray, shape (M,)
    freqs : ndarray, shape (M, d)
    """

    coeffs: np.ndarray
    freqs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        f = np.atleast_2d(np.asarray(self.freqs, dtype=complex))
        if f.shape[0] != c.shape[0]:
            raise ValueError("one frequency per coefficient is required")
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "freqs", f)

    @property
    def d(self) -> int:
        return self.freqs.shape[1]

    @classmethod
    def atom(cls, xi, c=1.0):
        return cls(np.array([c]), np.atleast_2d(xi))

    @classmethod
    def cosine(cls, xi, c=1.0):
        """Real symbol ``2 Re(c) cos(2 pi S(z, xi))``-type pair of atoms."""
        xi = np.atleast_1d(np.asarray(xi, dtype=complex))
        return cls(np.array([c, np.conj(c)]), np.vstack([xi, -xi]))

    def __add__(self, other: "TrigSymbol") -> "TrigSymbol":
        return TrigSymbol(np.concatenate([self.coeffs, other.coeffs]),
                          np.vstack([self.freqs, other.freqs]))

    def __mul__(self, other):
        if isinstance(other, TrigSymbol):
            c = np.outer(self.coeffs, other.coeffs).ravel()
            f = (self.freqs[:, None, :] + other.freqs[None, :, :]).reshape(-1, self.d)
            return TrigSymbol(c, f)
        return TrigSymbol(other * self.coeffs, self.freqs)

    __rmul__ = __mul__

    def conj(self) -> "TrigSymbol":
        return TrigSymbol(np.conj(self.coeffs), -self.freqs)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        s = np.real(np.einsum("...j,mj->...m", np.conj(z), self.freqs))
        return np.exp(2j * np.pi * s) @ self.coeffs

    def sup_bound(self) -> float:
        return float(np.sum(np.abs(self.coeffs)))

    def translated(self, z0) -> "TrigSymbol":
        """Symbol of ``z -> b(z + z0)``."""
        z0 = np.atleast_1d(np.asarray(z0, dtype=complex))
        phase = np.exp(2j * np.pi * np.real(self.freqs @ np.conj(z0)))
        return TrigSymbol(self.coeffs * phase, self.freqs)

    def rotated(self, theta: float) -> "TrigSymbol":
        """Symbol of ``z -> b(e^{i theta} z)``."""
        return TrigSymbol(self.coeffs, self.freqs * np.exp(-1j * theta))

    def to_json(self) -> str:
        """``{"atoms": [[re_c, im_c, [re xi_1, im xi_1, ...]], ...]}``."""
        atoms = []
        for c, f in zip(self.coeffs, self.freqs):
            inter = np.empty(2 * self.d)
            inter[0::2], inter[1::2] = f.real, f.imag
            atoms.append([float(c.real), float(c.imag), inter.tolist()])
        return json.dumps({"atoms": atoms})

    @classmethod
    def from_json(cls, text: str) -> "TrigSymbol":
        atoms = json.loads(text)["atoms"]
        c = np.array([a[0] + 1j * a[1] for a in atoms])
        f = np.array([np.asarray(a[2][0::2]) + 1j * np.asarray(a[2][1::2]) for a in atoms])
        return cls(c, f)


def weyl_quantize_trig(space: FockSpace, b: TrigSymbol) -> DenseOperator:
    """``b^Weyl = sum_m c_m W(sqrt(2) pi xi_m)``."""
    out = np.zeros((space.dim, space.dim), dtype=complex)
    for c, xi in zip(b.coeffs, b.freqs):
        out += c * weyl_operator(space, np.sqrt(2) * np.pi * xi).matrix
    return DenseOperator(space, out)


def anti_wick_quantize_trig(space: FockSpace, b: TrigSymbol) -> DenseOperator:
    """``b^AWick = sum_m c_m exp(-eps pi^2 |xi_m|^2 / 2) W(sqrt(2) pi xi_m)``."""
    damp = np.exp(-space.epsilon * np.pi ** 2 * np.sum(np.abs(b.freqs) ** 2, axis=1) / 2)
    return weyl_quantize_trig(space, TrigSymbol(b.coeffs * damp, b.freqs))


def trig_expectation(space: FockSpace, b: TrigSymbol, psi, anti_wick: bool = False,
                     tol: float | None = WEYL_TOL) -> complex:
    """``<psi, b^Weyl psi>`` (or Anti-Wick) without forming the dense operator."""
    x = _coeffs(psi)
    total = 0j
    for c, xi in zip(b.coeffs, b.freqs):
        v = c * fourier_wigner(space, x, x, xi, tol=tol)
        if anti_wick:
            v *= np.exp(-space.epsilon * np.pi ** 2 * np.vdot(xi, xi).real / 2)
        total += v
    return complex(total)


def anti_wick_quadrature(space: FockSpace, b, n_nodes: int | None = None) -> DenseOperator:
    """``int b(xi) |E(xi)><E(xi)| dxi / (pi eps)^d`` by Gauss-Hermite quadrature.

    ``b`` is any callable on ``C^d``.  The coherent projectors are the
    truncated ones, so the result is the exact compression of the Anti-Wick
    operator up to quadrature error.  Only ``d <= 2`` is supported.
    """
    if space.d > 2:
        raise ValueError("quadrature path supports d <= 2 only")
    eps = space.epsilon
    if n_nodes is None:
        n_nodes = space.n_max + 40 if space.d == 1 else space.n_max + 12
    t, w = hermgauss(n_nodes)
    x = np.sqrt(eps) * t
    grids = np.meshgrid(*([x] * (2 * space.d)), indexing="ij")
    weights = np.ones_like(grids[0])
    for wg in np.meshgrid(*([w] * (2 * space.d)), indexing="ij"):
        weights = weights * wg
    pts = np.stack([grids[2 * j] + 1j * grids[2 * j + 1] for j in range(space.d)], axis=-1)
    pts = pts.reshape(-1, space.d)
    weights = weights.ravel() / np.pi ** space.d
    vals = np.asarray(b(pts), dtype=complex).reshape(-1)
    # unnormalized exponential vectors: eps^{-|a|/2} xi^a / sqrt(a!)
    from scipy.special import gammaln
    basis = space.basis
    logf = -0.5 * gammaln(basis + 1).sum(axis=1) - 0.5 * space.numbers * np.log(eps)
    ev = np.ones((pts.shape[0], space.dim), dtype=complex)
    for j in range(space.d):
        ev *= pts[:, j:j + 1] ** basis[None, :, j]
    ev *= np.exp(logf)[None, :]
    M = (ev.T * (weights * vals)) @ np.conj(ev)
    return DenseOperator(space, M)


# ----------------------------------------------------------------------
# Hermite expansion of the Weyl operator


def _hermite_symbol(n: int, L: PolySymbol, s: float) -> PolySymbol:
    """``h_n(L / s)`` as a polynomial symbol."""
    coeffs = hermite_coefficients(n)
    out = PolySymbol.zero(L.d)
    power = PolySymbol.constant(L.d)
    for k, c in enumerate(coeffs):
        if k:
            power = power * L
        if c:
            out = out + (c / s ** k) * power
    return out


def _weyl_linear(xi) -> PolySymbol:
    """``i sqrt(2) S(xi, z)`` as a symbol."""
    xi = np.atleast_1d(np.asarray(xi, dtype=complex))
    S = 0.5 * (PolySymbol.annihilation(xi) + PolySymbol.creation(xi))
    return (1j * np.sqrt(2)) * S


def hermite_wick_term(space: FockSpace, xi, n: int):
    """``h_n(i sqrt(2) S(xi, z))^Wick``."""
    return wick_quantize(space, _hermite_symbol(n, _weyl_linear(xi), 1.0))


def weyl_hermite_series(space: FockSpace, xi, n_terms: int):
    """Partial sum of ``sum_n |sqrt(eps) xi|^n / (2^n n!) h_n(i sqrt(2) S(xi, z) / |sqrt(eps) xi|)^Wick``."""
    xi = np.atleast_1d(np.asarray(xi, dtype=complex))
    s = np.sqrt(space.epsilon) * np.linalg.norm(xi)
    if s == 0:
        return wick_quantize(space, PolySymbol.constant(space.d))
    L = _weyl_linear(xi)
    total = PolySymbol.zero(space.d)
    for n in range(n_terms):
        total = total + (s ** n / (2 ** n * factorial(n))) * _hermite_symbol(n, L, s)
    return wick_quantize(space, total)


def hermite_term_bound(n: int, k: int, j: int, epsilon: float, xi_norm: float) -> float:
    """``(1 + 2 sqrt(2 (k + j) eps) |xi|)^n n! / [n/2]!``."""
    return (1 + 2 * np.sqrt(2 * (k + j) * epsilon) * xi_norm) ** n * factorial(n) / factorial(n // 2)


# ----------------------------------------------------------------------
# Weyl versus Wick for polynomial symbols


def gaussian_convolution(b: PolySymbol, variance: float) -> PolySymbol:
    """``b * G`` for the centred complex Gaussian with ``E|w_j|^2 = variance``.

    ``E[conj(w)^mu w^nu] = delta_{mu nu} mu! variance^{|mu|}`` gives
    ``b * G = sum_mu variance^{|mu|} / mu! partial_z^mu partial_zbar^mu b``.
    """
    out = PolySymbol.zero(b.d)
    top = max((min(p, q) for p, q in b.bidegrees()), default=0)
    for k in range(top + 1):
        for mu in bounded_compositions(k, (k,) * b.d):
            fact = 1
            for m in mu:
                fact *= factorial(m)
            out = out + (variance ** k / fact) * b.d_z(mu).d_zbar(mu)
    return out


def weyl_quantize_poly(space: FockSpace, b: PolySymbol):
    """Weyl quantization of a polynomial, ``(b * G_{eps/2})^Wick``."""
    return wick_quantize(space, gaussian_convolution(b, space.epsilon / 2))


def weyl_wick_gap(space: FockSpace, b: PolySymbol, energy_cut: float = 2.0) -> float:
    """``|b^Wick - b^Weyl|`` on the blocks with ``eps n <= energy_cut``.

    The restriction is by energy, not block count, so the value scales as
    ``eps`` when ``eps`` varies at fixed ``energy_cut``.
    """
    diff = gaussian_convolution(b, space.epsilon / 2) - b
    nmax_in = int(np.floor(energy_cut / space.epsilon + 1e-9))
    deg = max((q - p for p, q in b.bidegrees()), default=0)
    if nmax_in + max(deg, 0) > space.n_max:
        raise GuardError(
            f"n_max={space.n_max} too small for energy cut {energy_cut} at eps={space.epsilon}")
    cols = np.nonzero(space.numbers <= nmax_in)[0]
    return wick_quantize(space, diff).restricted_norm(cols=cols)


def weyl_continuity(space: FockSpace, z1, direction, deltas, n_guard: int) -> np.ndarray:
    """``|(W(z1) - W(z1 + delta u)) (N + 1)^{-1/2}|`` restricted to blocks ``<= n_guard``."""
    z1 = np.atleast_1d(np.asarray(z1, dtype=complex))
    u = np.atleast_1d(np.asarray(direction, dtype=complex))
    cols = np.nonzero(space.numbers <= n_guard)[0]
    damp = 1.0 / np.sqrt(space.epsilon * space.numbers[cols] + 1.0)
    w1 = weyl_operator(space, z1).matrix[:, cols]
    out = []
    for dlt in deltas:
        w2 = weyl_operator(space, z1 + dlt * u).matrix[:, cols]
        out.append(np.linalg.norm((w1 - w2) * damp[None, :], 2))
    return np.array(out)


__all__ = [
    "TrigSymbol", "fourier_wigner", "laguerre_vw", "weyl_quantize_trig",
    "anti_wick_quantize_trig", "anti_wick_quadrature", "trig_expectation",
    "weyl_hermite_series", "hermite_wick_term", "hermite_term_bound",
    "gaussian_convolution", "weyl_quantize_poly", "weyl_wick_gap", "weyl_continuity",
    "real_inner", "symplectic",
]
