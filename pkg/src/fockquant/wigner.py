"""Characteristic functions of states and their semiclassical limits.

``G_eps(xi) = Tr[rho W(sqrt(2) pi xi)] exp(-eps pi^2 |xi|^2 / 2)`` is compared
on a finite probe set with closed-form limit functionals (point masses,
circle averages, their mixtures and Gaussians).  Also here: superpositions,
gauge averages, Wick-moment tests, the dimensional-defect example and the
normal approximation of Poisson sums.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg as sla
from scipy.special import gammaln
from scipy.stats import poisson

from .fock import (FockSpace, FockVector, GuardError, _coeffs, coherent_state, hermite_state,
                   make_space, number_operator, poisson_cutoff, weyl_apply)
from .quantizations import WEYL_TOL, real_inner, symplectic, weyl_hermite_series
from .symbols import PolySymbol, wick_quantize

CIRCLE_NODES = 256


# ----------------------------------------------------------------------
# states


@dataclass
class MixedState:
    """Density operator ``sum_i w_i |psi_i><psi_i|`` kept in factored form.

    Parameters
    ----------
    space : FockSpace
    vectors : (dim, m) array
        Columns ``psi_i`` (not necessarily normalized or orthogonal).
    weights : (m,) array
        Real weights; negative entries are allowed for differences.
    """

    space: FockSpace
    vectors: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=complex).reshape(self.space.dim, -1)
        self.weights = np.asarray(self.weights, dtype=float).reshape(-1)
        if self.weights.size != self.vectors.shape[1]:
            raise ValueError("one weight per vector is required")

    @classmethod
    def pure(cls, psi) -> "MixedState":
        x = _coeffs(psi)
        return cls(psi.space, x[:, None], [1.0])

    def trace(self) -> float:
        return float(np.sum(self.weights * np.sum(np.abs(self.vectors) ** 2, axis=0)))

    def expectation(self, op) -> complex:
        M = op.matrix if hasattr(op, "matrix") else op
        MV = M @ self.vectors
        return complex(np.sum(self.weights * np.sum(np.conj(self.vectors) * MV, axis=0)))

    def toarray(self) -> np.ndarray:
        return (self.vectors * self.weights) @ self.vectors.conj().T

    def __sub__(self, other: "MixedState") -> "MixedState":
        return MixedState(self.space, np.hstack([self.vectors, other.vectors]),
                          np.concatenate([self.weights, -other.weights]))


def _as_mixed(state) -> MixedState:
    if isinstance(state, MixedState):
        return state
    if isinstance(state, FockVector):
        return MixedState.pure(state)
    raise TypeError("expected a FockVector or a MixedState")


def trace_norm(state: MixedState) -> float:
    """``|sum_i w_i |psi_i><psi_i||_1`` from a QR factorization of the vectors."""
    X = state.vectors
    _, R = sla.qr(X, mode="economic")
    M = (R * state.weights) @ R.conj().T
    return float(np.sum(np.abs(sla.eigvalsh(0.5 * (M + M.conj().T)))))


def trace_norm_distance(rho1: MixedState, rho2: MixedState) -> float:
    """``|rho1 - rho2|_1``."""
    return trace_norm(rho1 - rho2)


# ----------------------------------------------------------------------
# characteristic functions


def char_function(space: FockSpace, state, xi, tol: float | None = WEYL_TOL) -> complex:
    """``G_eps(xi) = Tr[rho W(sqrt(2) pi xi)] exp(-eps pi^2 |xi|^2 / 2)``.

    Raises
    ------
    GuardError
        When the Weyl action pushes mass into the top blocks.
    """
    rho = _as_mixed(state)
    xi = np.atleast_1d(np.asarray(xi, dtype=complex))
    WV = weyl_apply(space, np.sqrt(2) * np.pi * xi, rho.vectors, tol=tol)
    tr = np.sum(rho.weights * np.sum(np.conj(rho.vectors) * WV, axis=0))
    return complex(tr * np.exp(-space.epsilon * np.pi ** 2 * np.vdot(xi, xi).real / 2))


def hermite_trace(space: FockSpace, state, xi, n_terms: int) -> complex:
    """``Tr[rho W(sqrt(2) pi xi)]`` from the Wick-ordered Hermite expansion of the
    Weyl operator, truncated after ``n_terms`` terms."""
    rho = _as_mixed(state)
    xi = np.atleast_1d(np.asarray(xi, dtype=complex))
    return rho.expectation(weyl_hermite_series(space, np.sqrt(2) * np.pi * xi, n_terms))


def positive_type_matrix(space: FockSpace, state, probes, tol: float | None = WEYL_TOL) -> np.ndarray:
    """``K_ij = exp(i eps sigma(f_i, f_j)/2) G_eps(xi_j - xi_i)``, ``f = sqrt(2) pi xi``.

    Equals ``Tr[rho W(f_i)^* W(f_j)]`` times Gaussian factors that keep it
    positive semi-definite.
    """
    probes = np.atleast_2d(np.asarray(probes, dtype=complex))
    m = probes.shape[0]
    eps = space.epsilon
    K = np.empty((m, m), dtype=complex)
    f = np.sqrt(2) * np.pi * probes
    for i in range(m):
        for j in range(m):
            g = char_function(space, state, probes[j] - probes[i], tol=tol)
            K[i, j] = np.exp(0.5j * eps * symplectic(f[i], f[j])) * g
    return K


@dataclass(frozen=True)
class LimitChar:
    """Limit characteristic functional.

    Kinds
    -----
    ``dirac``
        ``xi -> exp(2 pi i S(xi, z))``.
    ``circle``
        ``xi -> (1/2 pi) int exp(2 pi i S(e^{i theta} z, xi)) e^{-i m theta} dtheta``
        by the 256-point periodic trapezoid rule.
    ``mixture``
        ``sum_k w_k L_k(xi)``.
    ``gaussian``
        ``xi -> exp(-pi^2 c |<u, xi>|^2)`` for a unit direction ``u``.
    """

    kind: str
    z: tuple = ()
    m: int = 0
    c: float = 0.0
    parts: tuple = ()
    weights: tuple = ()

    @classmethod
    def dirac(cls, z):
        return cls("dirac", z=tuple(np.atleast_1d(np.asarray(z, dtype=complex))))

    @classmethod
    def circle(cls, z, m: int = 0):
        return cls("circle", z=tuple(np.atleast_1d(np.asarray(z, dtype=complex))), m=int(m))

    @classmethod
    def mixture(cls, weights, parts):
        return cls("mixture", parts=tuple(parts), weights=tuple(complex(w) for w in weights))

    @classmethod
    def gaussian(cls, c: float, direction):
        u = np.atleast_1d(np.asarray(direction, dtype=complex))
        return cls("gaussian", z=tuple(u / np.linalg.norm(u)), c=float(c))

    def __call__(self, xi) -> complex:
        xi = np.atleast_1d(np.asarray(xi, dtype=complex))
        z = np.asarray(self.z, dtype=complex)
        if self.kind == "dirac":
            return complex(np.exp(2j * np.pi * real_inner(xi, z)))
        if self.kind == "circle":
            th = 2 * np.pi * np.arange(CIRCLE_NODES) / CIRCLE_NODES
            s = np.real(np.exp(-1j * th) * np.vdot(z, xi))
            return complex(np.mean(np.exp(2j * np.pi * s - 1j * self.m * th)))
        if self.kind == "mixture":
            return complex(sum(w * p(xi) for w, p in zip(self.weights, self.parts)))
        if self.kind == "gaussian":
            return complex(np.exp(-np.pi ** 2 * self.c * abs(np.vdot(z, xi)) ** 2))
        raise ValueError(f"unknown limit kind {self.kind!r}")


@dataclass
class StateFamily:
    """``eps -> (space, state)`` generator with a label."""

    name: str
    generator: Callable[[float], tuple]

    def __call__(self, eps: float):
        return self.generator(eps)


def count_inversions(residuals) -> int:
    """Number of consecutive increases in a sequence expected to decrease."""
    return int(np.sum(np.diff(np.asarray(residuals, dtype=float)) > 0))


@dataclass
class CharReport:
    """Measured ``G_eps`` on probes against a limit, per ``eps``."""

    family: str
    probes: np.ndarray
    epsilons: np.ndarray
    values: np.ndarray
    limits: np.ndarray
    tol: float
    extras: dict = field(default_factory=dict)

    @property
    def residuals(self) -> np.ndarray:
        return np.max(np.abs(self.values - self.limits[None, :]), axis=1)

    @property
    def inversions(self) -> int:
        return count_inversions(self.residuals)

    @property
    def passed(self) -> bool:
        return bool(self.residuals[-1] <= self.tol and self.inversions <= 1)

    def rows(self):
        """CSV rows ``(epsilon, probe_id, g_re, g_im, limit_re, limit_im, abs_err)``."""
        for i, eps in enumerate(self.epsilons):
            for j in range(self.probes.shape[0]):
                g, lim = self.values[i, j], self.limits[j]
                yield (eps, j, g.real, g.imag, lim.real, lim.imag, abs(g - lim))


def compare_limit(family: StateFamily, limit: LimitChar, probes, eps_grid,
                  tol: float = 0.05, weyl_tol: float | None = WEYL_TOL) -> CharReport:
    """Evaluate ``G_eps`` of ``family`` on ``probes`` for each ``eps`` and
    compare with ``limit``."""
    probes = np.atleast_2d(np.asarray(probes, dtype=complex))
    vals = np.empty((len(eps_grid), probes.shape[0]), dtype=complex)
    for i, eps in enumerate(eps_grid):
        space, state = family(eps)
        for j, xi in enumerate(probes):
            vals[i, j] = char_function(space, state, xi, tol=weyl_tol)
    lim = np.array([limit(xi) for xi in probes])
    return CharReport(family.name, probes, np.asarray(eps_grid, dtype=float), vals, lim, tol)


# ----------------------------------------------------------------------
# families


def _n_max_for(z_norm2: float, eps: float, extra: int = 0, tol: float = 1e-22) -> int:
    return poisson_cutoff(z_norm2 / eps, tol) + extra


def hermite_family(z, margin: int = 60) -> StateFamily:
    """``z^{(x)k}`` with ``k = round(1/eps)`` (``|z| = 1``)."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))

    def gen(eps):
        k = int(round(1 / eps))
        space = make_space(z.size, k + margin, eps)
        return space, hermite_state(space, z, k)
    return StateFamily("hermite", gen)


def coherent_family(z, probe_radius: float = 2.0) -> StateFamily:
    """Coherent states ``E(z)``.

    ``W(sqrt(2) pi xi)`` moves ``E(z)`` to ``E(z + i eps pi xi)``, so the
    truncation covers ``|z| + eps pi probe_radius``.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))

    def gen(eps):
        r = np.linalg.norm(z) + eps * np.pi * probe_radius
        space = make_space(z.size, _n_max_for(r ** 2, eps, extra=20), eps)
        return space, coherent_state(space, z, tol=1e-22)
    return StateFamily("coherent", gen)


def superposition_state(space: FockSpace, kind: str, params: dict) -> FockVector:
    """Superpositions of product and coherent states.

    Kinds
    -----
    ``"products"``
        ``L^{-1/2} sum_l z_l^{(x)k}`` with ``params = {"zs": [...], "k": k}``.
    ``"coherent_product"``
        ``(E(z) + z^{(x)k}) / sqrt(2)`` with ``params = {"z": z, "k": k}``.
    ``"coherent_pair"``
        ``(E(z1) + E(z2)) / sqrt(2)`` with ``params = {"z1": .., "z2": ..}``.
    """
    if kind == "products":
        zs = [np.atleast_1d(np.asarray(z, dtype=complex)) for z in params["zs"]]
        v = sum(hermite_state(space, z, params["k"]).coeffs for z in zs) / np.sqrt(len(zs))
        return FockVector(space, v)
    if kind == "coherent_product":
        z = np.atleast_1d(np.asarray(params["z"], dtype=complex))
        E = coherent_state(space, z, tol=params.get("tol", 1e-22))
        return FockVector(space, (E.coeffs + hermite_state(space, z, params["k"]).coeffs) / np.sqrt(2))
    if kind == "coherent_pair":
        tol = params.get("tol", 1e-22)
        E1 = coherent_state(space, params["z1"], tol=tol)
        E2 = coherent_state(space, params["z2"], tol=tol)
        return FockVector(space, (E1.coeffs + E2.coeffs) / np.sqrt(2))
    raise ValueError(f"unknown superposition kind {kind!r}")


def coherent_cross_term(space: FockSpace, z1, z2, xi) -> complex:
    """``<E(z1), W(sqrt(2) pi xi) E(z2)>``."""
    E1 = coherent_state(space, z1, tol=1e-22)
    E2 = coherent_state(space, z2, tol=1e-22)
    return complex(np.vdot(E1.coeffs, weyl_apply(space, np.sqrt(2) * np.pi * np.atleast_1d(xi),
                                                 E2.coeffs, tol=WEYL_TOL)))


# ----------------------------------------------------------------------
# gauge averages


def _unitary_apply(U, x):
    if U is None:
        return x
    if hasattr(U, "apply"):
        return _coeffs(U.apply(x))
    M = U.matrix if hasattr(U, "matrix") else U
    return M @ x


def check_number_commuting(space: FockSpace, U, seed: int = 0, tol: float = 1e-10) -> float:
    """Residual of ``[N, U]`` on a random vector; raises when it exceeds ``tol``."""
    if U is None:
        return 0.0
    rng = np.random.default_rng(seed)
    x = rng.normal(size=space.dim) + 1j * rng.normal(size=space.dim)
    n = space.numbers
    res = np.linalg.norm(_unitary_apply(U, n * x) - n * _unitary_apply(U, x)) / np.linalg.norm(x)
    if res > tol * max(1.0, space.n_max):
        raise GuardError(f"U does not commute with the number operator (residual {res:.2e})")
    return float(res)


def gauge_average(space: FockSpace, U, z, phi: Callable[[np.ndarray], np.ndarray],
                  support: float | None = None) -> MixedState:
    """``sum_n sqrt(eps) phi(sqrt(eps)(n - 1/eps)) |U z^{(x)n}><U z^{(x)n}|``.

    With ``support`` given, only ``n`` with ``|sqrt(eps)(n - 1/eps)| <= support``
    enter the sum, which keeps the occupied blocks away from ``n_max``.
    """
    check_number_commuting(space, U)
    eps = space.epsilon
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    ns = np.arange(space.n_max + 1)
    s = np.sqrt(eps) * (ns - 1 / eps)
    w = np.sqrt(eps) * np.asarray(phi(s), dtype=float)
    if support is not None:
        w = np.where(np.abs(s) <= support, w, 0.0)
    keep = np.nonzero(w > 0)[0]
    cols = np.stack([_unitary_apply(U, hermite_state(space, z, int(n)).coeffs) for n in keep], axis=1)
    return MixedState(space, cols, w[keep])


def sigma_theta(space: FockSpace, U, z, n_nodes: int = CIRCLE_NODES) -> MixedState:
    """``(1/2 pi) int Gamma(e^{i theta}) |U E(z)><U E(z)| Gamma(e^{-i theta}) dtheta``
    by the periodic trapezoid rule."""
    check_number_commuting(space, U)
    E = coherent_state(space, z, tol=1e-12)
    v = _unitary_apply(U, E.coeffs)
    th = 2 * np.pi * np.arange(n_nodes) / n_nodes
    cols = np.exp(1j * np.outer(space.numbers, th)) * v[:, None]
    return MixedState(space, cols, np.full(n_nodes, 1.0 / n_nodes))


def sigma_poisson(space: FockSpace, U, z) -> MixedState:
    """``sum_n e^{-|z|^2/eps} / (eps^n n!) |U z^{(x)n}><U z^{(x)n}|``."""
    check_number_commuting(space, U)
    eps = space.epsilon
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    ns = np.arange(space.n_max + 1)
    w = np.exp(-np.vdot(z, z).real / eps - ns * np.log(eps) - gammaln(ns + 1))
    cols = np.stack([_unitary_apply(U, hermite_state(space, z, int(n)).coeffs) for n in ns], axis=1)
    return MixedState(space, cols, w)


# ----------------------------------------------------------------------
# Wick moments


@dataclass
class WickMomentReport:
    epsilons: np.ndarray
    values: np.ndarray
    target: complex
    number_moments: np.ndarray

    @property
    def residuals(self) -> np.ndarray:
        return np.abs(self.values - self.target)

    @property
    def inversions(self) -> int:
        return count_inversions(self.residuals)


def wick_moment_test(family: StateFamily, b: PolySymbol, target: complex, eps_grid,
                     number_power: int = 1) -> WickMomentReport:
    """``Tr[rho_eps b^Wick]`` along ``eps_grid`` with ``Tr[rho_eps N^delta]``."""
    vals, moms = [], []
    for eps in eps_grid:
        space, state = family(eps)
        rho = _as_mixed(state)
        vals.append(rho.expectation(wick_quantize(space, b)))
        N = number_operator(space).matrix.diagonal().real ** number_power
        moms.append(float(np.sum(rho.weights * (N @ np.abs(rho.vectors) ** 2))))
    return WickMomentReport(np.asarray(eps_grid, float), np.array(vals), complex(target),
                            np.array(moms))


def prodcoh_wick_limit(b: PolySymbol, z, m: int = 0) -> complex:
    """Limit of ``<z^{(x)(k-m)}, b^Wick z^{(x)k}>``-type moments: ``delta_{p-q, m} b(z)``."""
    out = 0j
    for p, q in b.bidegrees():
        if p - q == m:
            out += complex(b.part(p, q)(np.asarray(z, dtype=complex)))
    return out


# ----------------------------------------------------------------------
# dimensional defect


def dimensional_defect(dims, epsilon: float = 1.0, n_max: int = 7) -> list[dict]:
    """Coherent states ``E(e_d)`` in ``C^d`` tested against observables of the
    first coordinate.

    Returns one record per ``d`` with the Wick moments of ``<e_1, z>`` and
    ``|z_1|^2`` (exactly 0 by orthogonality), the number expectation
    (1 minus the truncated Poisson tail) and the tail itself.
    """
    out = []
    for d in dims:
        space = make_space(d, n_max, epsilon)
        e = np.zeros(d, dtype=complex)
        e[-1] = 1.0
        E = coherent_state(space, e, tol=1.0)
        e1 = np.zeros(d, dtype=complex)
        e1[0] = 1.0
        lin = PolySymbol.annihilation(e1)
        quad = lin.conj() * lin
        x = E.coeffs
        m_lin = np.vdot(x, wick_quantize(space, lin).matrix @ x)
        m_quad = np.vdot(x, wick_quantize(space, quad).matrix @ x)
        num = float(np.vdot(x, number_operator(space).matrix @ x).real)
        tail = float(poisson.sf(n_max, 1.0 / epsilon))
        exact_num = float(np.sum(np.arange(n_max + 1) * epsilon
                                 * poisson.pmf(np.arange(n_max + 1), 1.0 / epsilon)))
        out.append({"d": d, "dim": space.dim, "wick_linear": complex(m_lin),
                    "wick_quadratic": complex(m_quad), "number": num,
                    "number_truncated_exact": exact_num, "tail": tail})
    return out


# ----------------------------------------------------------------------
# normal approximation of Poisson sums


def rule_constant(n, lam):
    return np.ones_like(np.asarray(n, dtype=float))


def rule_mean(n, lam):
    return np.asarray(n, dtype=float) / lam


def rule_indicator(alpha: float, beta: float):
    """``a_n = 1`` when ``alpha < (n - lam)/sqrt(lam) < beta``."""
    def rule(n, lam):
        s = (np.asarray(n, dtype=float) - lam) / np.sqrt(lam)
        return ((s > alpha) & (s < beta)).astype(float)
    return rule


def normal_approx(rule, lam: float) -> tuple[float, float]:
    """``lhs = sum_n Poisson(lam)(n) a_n`` and its Gaussian counterpart.

    ``rhs = int a_{floor(sqrt(lam) s + lam)} e^{-s^2/2}/sqrt(2 pi) ds`` by the
    composite midpoint rule on ``[-12, 12]`` with step
    ``min(0.01, 1/(2 sqrt(lam)))``; indices below 0 contribute 0.
    """
    lo = int(poisson.ppf(1e-16, lam))
    hi = int(poisson.isf(1e-14, lam)) + 1
    n = np.arange(max(lo, 0), hi + 1)
    # renormalizing removes the rounding drift of the pmf values; the
    # discarded tails are below 1e-14
    pmf = poisson.pmf(n, lam)
    lhs = math.fsum(pmf * rule(n, lam)) / math.fsum(pmf)
    h = min(0.01, 1.0 / (2 * np.sqrt(lam)))
    m = int(np.ceil(24 / h))
    h = 24 / m
    s = -12 + h * (np.arange(m) + 0.5)
    idx = np.floor(np.sqrt(lam) * s + lam)
    vals = np.where(idx >= 0, rule(np.maximum(idx, 0), lam), 0.0)
    rhs = math.fsum(vals * np.exp(-s ** 2 / 2)) * h / np.sqrt(2 * np.pi)
    return lhs, rhs


__all__ = [
    "MixedState", "trace_norm", "trace_norm_distance", "char_function", "hermite_trace",
    "positive_type_matrix", "LimitChar", "StateFamily", "CharReport", "compare_limit",
    "count_inversions", "hermite_family", "coherent_family", "superposition_state",
    "coherent_cross_term", "check_number_commuting", "gauge_average", "sigma_theta",
    "sigma_poisson", "WickMomentReport", "wick_moment_test", "prodcoh_wick_limit",
    "dimensional_defect", "rule_constant", "rule_mean", "rule_indicator", "normal_approx",
]
