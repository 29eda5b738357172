"""Finite-dimensional mean-field model ``H = dGamma(A) + Q^Wick``.

Exact propagation is block by block, since the Hamiltonian preserves the
particle number.  Classical counterparts are the Hartree flow, the
squeezed-coherent (Hepp) approximation of an evolved coherent state and the
time-ordered expansion of evolved Wick observables in powers of ``eps``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import factorial

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.integrate import cumulative_simpson
from scipy.interpolate import CubicHermiteSpline
from scipy.sparse.linalg import expm_multiply
from scipy.special import gammaln
from scipy.stats import poisson

from .fock import (BlockOperator, FockSpace, FockVector, GuardError, _coeffs, coherent_state,
                   hermite_state, make_space, poisson_cutoff, second_quantization, top_mass, vacuum, weyl_apply)
from .symbols import (PolySymbol, compile_symbol, free_evolved, poisson_bracket, substitute,
                      wick_quantize)

HERMITIAN_TOL = 1e-12
RICHARDSON_TOL = 1e-7


# ----------------------------------------------------------------------
# model


def _matrix_from_json(obj) -> np.ndarray:
    if isinstance(obj, dict):
        return np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj.get("im", 0.0), dtype=float)
    return np.asarray(obj, dtype=complex)


def _matrix_to_json(M: np.ndarray) -> dict:
    M = np.asarray(M, dtype=complex)
    return {"re": M.real.tolist(), "im": M.imag.tolist()}


@dataclass
class ModelSpec:
    """One-particle energy ``A`` and two-body tensor ``Q~`` with run parameters.

    Parameters
    ----------
    A : (d, d) array
        Hermitian one-particle matrix.
    Qtensor : (D, D) array
        Hermitian operator on the two-particle block in occupation
        coordinates (``D = d (d + 1) / 2``); ``Q(z) = <z^2, Q~ z^2>``.
    epsilon : float
        Semiclassical parameter.
    n_max : int
        Truncation level used by :meth:`space`.
    V_norm : float, optional
        Declared interaction size entering the regime conditions.  Defaults
        to the operator norm of ``2 Q~``.
    """

    A: np.ndarray
    Qtensor: np.ndarray
    epsilon: float = 0.1
    n_max: int = 40
    V_norm: float | None = None
    _Q: PolySymbol = field(init=False, repr=False)

    def __post_init__(self):
        self.A = np.atleast_2d(np.asarray(self.A, dtype=complex))
        d = self.A.shape[0]
        D = d * (d + 1) // 2
        self.Qtensor = np.atleast_2d(np.asarray(self.Qtensor, dtype=complex))
        if self.A.shape != (d, d) or self.Qtensor.shape != (D, D):
            raise ValueError(f"A must be {d}x{d} and Qtensor {D}x{D}")
        if np.max(np.abs(self.A - self.A.conj().T)) > HERMITIAN_TOL:
            raise ValueError("A is not Hermitian")
        if np.max(np.abs(self.Qtensor - self.Qtensor.conj().T)) > HERMITIAN_TOL:
            raise ValueError("Qtensor is not Hermitian")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.V_norm is None:
            self.V_norm = float(np.linalg.norm(2 * self.Qtensor, 2))
        self._Q = PolySymbol.from_tensor(self.Qtensor, 2, 2, d)

    @property
    def d(self) -> int:
        return self.A.shape[0]

    @property
    def Q(self) -> PolySymbol:
        """Interaction symbol ``Q(z)``."""
        return self._Q

    @classmethod
    def scalar(cls, a: float, q0: float, **kw) -> "ModelSpec":
        """``d = 1`` model with ``h(z) = a|z|^2 + q0|z|^4``."""
        return cls(A=[[a]], Qtensor=[[q0]], **kw)

    def with_epsilon(self, epsilon: float, n_max: int | None = None) -> "ModelSpec":
        return ModelSpec(self.A, self.Qtensor, epsilon, self.n_max if n_max is None else n_max,
                         self.V_norm)

    def space(self) -> FockSpace:
        return make_space(self.d, self.n_max, self.epsilon)

    def energy(self, z) -> float:
        """Classical energy ``<z, A z> + Q(z)``."""
        z = np.asarray(z, dtype=complex)
        return float((np.vdot(z, self.A @ z) + self._Q(z)).real)

    def gradient_symbols(self) -> list[PolySymbol]:
        """``partial_{conj z_j} Q`` for each ``j``."""
        e = np.eye(self.d, dtype=int)
        return [self._Q.d_zbar(tuple(e[j])) for j in range(self.d)]

    def to_json(self) -> str:
        return json.dumps({"A": _matrix_to_json(self.A), "Qtensor": _matrix_to_json(self.Qtensor),
                           "epsilon": self.epsilon, "n_max": self.n_max, "V_norm": self.V_norm})

    @classmethod
    def from_json(cls, text) -> "ModelSpec":
        obj = json.loads(text) if isinstance(text, str) else dict(text)
        return cls(_matrix_from_json(obj["A"]), _matrix_from_json(obj["Qtensor"]),
                   float(obj.get("epsilon", 0.1)), int(obj.get("n_max", 40)), obj.get("V_norm"))


def hamiltonian(space: FockSpace, model: ModelSpec) -> BlockOperator:
    """``dGamma(A) + Q^Wick`` on ``space`` (number conserving)."""
    if space.n_max < 2:
        raise GuardError("the Hamiltonian needs n_max >= 2")
    H = second_quantization(space, model.A) + wick_quantize(space, model.Q)
    if abs(H.matrix - H.matrix.conj().T).max() > 1e-10 * max(1.0, abs(H.matrix).max()):
        raise RuntimeError("Hamiltonian is not Hermitian")
    return BlockOperator(space, H.matrix, 0)


class Propagator:
    """``U(t) = exp(-i t H / eps)`` from per-block eigendecompositions."""

    def __init__(self, space: FockSpace, model: ModelSpec, H: BlockOperator | None = None):
        self.space = space
        self.model = model
        H = hamiltonian(space, model) if H is None else H
        self.eig = []
        for n in range(space.n_max + 1):
            w, v = sla.eigh(H.block(n))
            self.eig.append((w, v))

    def apply(self, psi, t: float):
        """Return ``U(t) psi`` (same kind as ``psi``)."""
        x = _coeffs(psi)
        y = np.empty_like(x, dtype=complex)
        for n, (w, v) in enumerate(self.eig):
            sl = self.space.block(n)
            ph = np.exp(-1j * t * w / self.space.epsilon)
            y[sl] = v @ (ph * (v.conj().T @ x[sl]))
        if isinstance(psi, FockVector):
            return FockVector(self.space, y, psi.tail_mass)
        return y

    def operator(self, t: float) -> BlockOperator:
        blocks = [(v * np.exp(-1j * t * w / self.space.epsilon)) @ v.conj().T for w, v in self.eig]
        return BlockOperator(self.space, sp.block_diag(blocks, format="csr"), 0)


def propagate(space: FockSpace, model: ModelSpec, psi, t: float):
    """``exp(-i t H / eps) psi``."""
    return Propagator(space, model).apply(psi, t)


# ----------------------------------------------------------------------
# Hartree flow


@dataclass
class HartreeTrajectory:
    """Samples of ``z_t`` and ``omega(t) = int_0^t Q(z_s) ds`` on a grid."""

    times: np.ndarray
    z: np.ndarray
    omega: np.ndarray
    velocity: np.ndarray
    q_values: np.ndarray
    norm_drift: float
    energy_drift: float
    richardson_error: float

    def at(self, t: float) -> np.ndarray:
        """Cubic Hermite interpolation of ``z`` at time ``t``."""
        spl = CubicHermiteSpline(self.times, self.z, self.velocity, axis=0)
        return np.asarray(spl(t), dtype=complex)

    def omega_at(self, t: float) -> float:
        spl = CubicHermiteSpline(self.times, self.omega, self.q_values)
        return float(spl(t))


def _hartree_rhs(model: ModelSpec):
    grads = [compile_symbol(g) for g in model.gradient_symbols()]
    A = model.A

    def rhs(z):
        return -1j * (A @ z + np.array([g(z) for g in grads]))
    return rhs


def _rk4(rhs, z0, dt, n):
    out = np.empty((n + 1, z0.size), dtype=complex)
    out[0] = z = z0
    for i in range(n):
        k1 = rhs(z)
        k2 = rhs(z + 0.5 * dt * k1)
        k3 = rhs(z + 0.5 * dt * k2)
        k4 = rhs(z + dt * k3)
        z = z + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        out[i + 1] = z
    return out


def hartree_flow(model: ModelSpec, z0, T: float, dt: float) -> HartreeTrajectory:
    """Integrate ``i dz/dt = A z + partial_zbar Q(z)`` on ``[0, T]``.

    Classic RK4 with a fixed step (adjusted so that it divides ``T``), checked
    against a run with half the step.  ``T`` may be negative.

    Raises
    ------
    GuardError
        "step too large" when the two runs differ by more than 1e-7.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    z0 = np.atleast_1d(np.asarray(z0, dtype=complex))
    if z0.shape != (model.d,):
        raise ValueError("z0 has the wrong length")
    n = max(2, int(np.ceil(abs(T) / dt)))
    n += n % 2
    h = T / n
    rhs = _hartree_rhs(model)
    z = _rk4(rhs, z0, h, n)
    z_half = _rk4(rhs, z0, h / 2, 2 * n)[::2]
    rich = float(np.max(np.abs(z - z_half)))
    if not np.isfinite(rich) or rich > RICHARDSON_TOL:
        raise GuardError(f"step too large: step-halving disagreement {rich:.2e}")
    times = np.linspace(0.0, T, n + 1)
    Qc = compile_symbol(model.Q)
    qv = np.array([Qc(zz).real for zz in z_half])
    omega = cumulative_simpson(qv, x=times, initial=0.0)
    vel = np.array([rhs(zz) for zz in z_half])
    norms = np.linalg.norm(z_half, axis=1)
    en = np.array([model.energy(zz) for zz in z_half])
    e0 = abs(en[0]) if en[0] != 0 else 1.0
    return HartreeTrajectory(times, z_half, omega, vel, qv,
                             float(np.max(np.abs(norms - norms[0]))),
                             float(np.max(np.abs(en - en[0])) / e0), rich)


# ----------------------------------------------------------------------
# Hepp approximation


def quadratic_part(model: ModelSpec, zt) -> PolySymbol:
    """Degree-two part of ``w -> Q(z_t + w)`` (the Taylor quadratic form)."""
    return substitute(model.Q, translate=zt).total_degree_part(2)


def _free_step(space: FockSpace, A, tau: float) -> BlockOperator:
    H0 = second_quantization(space, A)
    blocks = []
    for n in range(space.n_max + 1):
        w, v = sla.eigh(H0.block(n))
        blocks.append((v * np.exp(-1j * tau * w / space.epsilon)) @ v.conj().T)
    return BlockOperator(space, sp.block_diag(blocks, format="csr"), 0)


def bogoliubov_vacuum(model: ModelSpec, traj: HartreeTrajectory, t: float, n_aux: int,
                      n_steps: int) -> tuple[FockVector, dict]:
    """``U_2(t, 0) Omega`` on an ``eps = 1`` space truncated at ``n_aux``.

    The quadratic generator scales exactly like ``eps`` in the rescaled
    variables, so the evolution does not depend on ``eps``.  Strang
    splitting: exact free half steps around a matrix exponential of the
    quadratic part frozen at the step midpoint.
    """
    aux = make_space(model.d, n_aux, 1.0)
    h = t / n_steps
    half = _free_step(aux, model.A, h / 2).matrix
    psi = vacuum(aux).coeffs
    for k in range(n_steps):
        zm = traj.at((k + 0.5) * h)
        G = wick_quantize(aux, quadratic_part(model, zm)).matrix
        psi = half @ psi
        psi = expm_multiply((-1j * h) * G.tocsc(), psi)
        psi = half @ psi
    drift = abs(np.linalg.norm(psi) - 1.0)
    return FockVector(aux, psi), {"norm_drift": float(drift),
                                  "aux_top_mass": float(top_mass(psi, aux))}


def hepp_approximation(space: FockSpace, model: ModelSpec, z0, t: float, n_steps: int = 200,
                       n_aux: int | None = None, aux_tol: float = 1e-12,
                       weyl_tol: float = 1e-9) -> tuple[FockVector, dict]:
    """Squeezed coherent approximation ``e^{i omega/eps} W(sqrt2 z_t/(i eps)) U_2 Omega``.

    Returns
    -------
    FockVector, dict
        The approximation and diagnostics (trajectory drifts, auxiliary
        truncation mass, norm drift of the quadratic evolution).

    Raises
    ------
    GuardError
        Coherent tail along the trajectory too large for ``space``, mass of
        the quadratic evolution reaching the auxiliary truncation, or norm
        drift above 1e-6.
    """
    eps = space.epsilon
    z0 = np.atleast_1d(np.asarray(z0, dtype=complex))
    traj = hartree_flow(model, z0, t, abs(t) / (4 * n_steps) if t else 1.0)
    mu = np.max(np.sum(np.abs(traj.z) ** 2, axis=1)) / eps
    tail = float(poisson.sf(space.n_max, mu))
    if tail > weyl_tol:
        raise GuardError(f"coherent tail {tail:.2e} along the trajectory exceeds {weyl_tol:.0e}; "
                         f"increase n_max={space.n_max}")
    n_aux = min(space.n_max, 40) if n_aux is None else min(n_aux, space.n_max)
    if t:
        u2, diag = bogoliubov_vacuum(model, traj, t, n_aux, n_steps)
    else:
        u2, diag = vacuum(make_space(model.d, n_aux, 1.0)), {"norm_drift": 0.0, "aux_top_mass": 0.0}
    if diag["norm_drift"] > 1e-6:
        raise GuardError(f"norm drift {diag['norm_drift']:.2e} of the quadratic evolution")
    if diag["aux_top_mass"] > aux_tol:
        raise GuardError(f"quadratic evolution reaches the auxiliary truncation n={n_aux}")
    emb = np.zeros(space.dim, dtype=complex)
    emb[space.index_of(u2.space.basis)] = u2.coeffs
    zt = traj.z[-1]
    out = weyl_apply(space, np.sqrt(2) * zt / (1j * eps), emb, tol=weyl_tol)
    out = out * np.exp(1j * traj.omega[-1] / eps)
    diag.update({"z_t": zt, "omega": float(traj.omega[-1]), "coherent_tail": tail,
                 "hartree_norm_drift": traj.norm_drift, "hartree_energy_drift": traj.energy_drift})
    return FockVector(space, out), diag


def hepp_error(space: FockSpace, model: ModelSpec, z0, t: float, **kw) -> float:
    """``|| U(t) E(z0) - hepp_approximation ||``."""
    E = coherent_state(space, z0, tol=1e-14)
    exact = Propagator(space, model).apply(E, t)
    approx, _ = hepp_approximation(space, model, z0, t, **kw)
    return float(np.linalg.norm(exact.coeffs - approx.coeffs))


# ----------------------------------------------------------------------
# Dyson expansion


@dataclass
class DysonSymbol:
    """``C^(n)_r`` for times ``(t_n, ..., t_1, t)``."""

    times: tuple
    n: int
    r: int
    symbol: PolySymbol


def _hierarchy_step(Qs: PolySymbol, prev: list[PolySymbol]) -> list[PolySymbol]:
    """``C_r -> {Q, C_r} + 1/2 {Q, C_{r-1}}^(2)`` for all ``r``."""
    d = Qs.d
    out = []
    for r in range(len(prev) + 1):
        c = PolySymbol.zero(d)
        if r < len(prev):
            c = c + poisson_bracket(Qs, prev[r], 1)
        if r >= 1:
            c = c + 0.5 * poisson_bracket(Qs, prev[r - 1], 2)
        out.append(c)
    return out


def dyson_hierarchy(model: ModelSpec, b: PolySymbol, times) -> list[PolySymbol]:
    """All ``C^(n)_r``, ``r = 0..n``, for ``times = (t_n, ..., t_1, t)``."""
    times = tuple(float(s) for s in times)
    C = [free_evolved(b, model.A, times[-1])]
    for s in reversed(times[:-1]):
        C = _hierarchy_step(free_evolved(model.Q, model.A, s), C)
    return C


def dyson_symbol(model: ModelSpec, b: PolySymbol, times, r: int) -> DysonSymbol:
    """``C^(n)_r`` with ``n = len(times) - 1``; zero outside ``0 <= r <= n``."""
    n = len(times) - 1
    if r < 0 or r > n:
        return DysonSymbol(tuple(times), n, r, PolySymbol.zero(b.d))
    return DysonSymbol(tuple(times), n, r, dyson_hierarchy(model, b, times)[r])


def _flow_invariant(model: ModelSpec, t: float) -> bool:
    for s in (t / 3, t):
        if not free_evolved(model.Q, model.A, s).allclose(model.Q, atol=1e-13):
            return False
    return True


def simplex_integrals(model: ModelSpec, b: PolySymbol, z, t: float, n_max: int,
                      order: int = 16) -> np.ndarray:
    """``I[n, r] = int_{t > t_1 > ... > t_n > 0} C^(n)_r(z)``.

    When ``Q`` is invariant under the free flow the integrand does not
    depend on the times and the simplex volume ``t^n/n!`` is used.
    Otherwise nested Gauss-Legendre quadrature of order ``order`` per level.
    """
    z = np.asarray(z, dtype=complex)
    I = np.zeros((n_max + 1, n_max + 1), dtype=complex)
    C0 = [free_evolved(b, model.A, t)]
    I[0, 0] = C0[0](z)
    if n_max == 0:
        return I
    if _flow_invariant(model, t):
        C = C0
        for n in range(1, n_max + 1):
            C = _hierarchy_step(model.Q, C)
            for r, c in enumerate(C):
                I[n, r] = c(z) * t ** n / factorial(n)
        return I
    x, w = np.polynomial.legendre.leggauss(order)
    cache: dict = {}

    def Q_at(s):
        if s not in cache:
            cache[s] = free_evolved(model.Q, model.A, s)
        return cache[s]

    def rec(C, upper, weight, level):
        nodes = 0.5 * upper * (x + 1)
        for s, ws in zip(nodes, 0.5 * upper * w):
            Cn = _hierarchy_step(Q_at(float(s)), C)
            for r, c in enumerate(Cn):
                I[level, r] += weight * ws * c(z)
            if level < n_max:
                rec(Cn, s, weight * ws, level + 1)

    rec(C0, t, 1.0, 1)
    return I


def matrix_element_prefactor(k: int, m: int, p: int, q: int, epsilon: float) -> float:
    """``sqrt(k! (k-m)! eps^{p+q}) / (k-p)!``, the coefficient of ``b(z)`` in
    ``<z^{(x)(k-m)}, b^Wick z^{(x)k}>`` for ``b`` of bidegree ``(p, q)``."""
    if k < p:
        return 0.0
    return float(np.exp(0.5 * (gammaln(k + 1) + gammaln(k - m + 1) + (p + q) * np.log(epsilon))
                        - gammaln(k - p + 1)))


def dyson_matrix_element(space: FockSpace, model: ModelSpec, b: PolySymbol, z, k: int, m: int,
                         t: float, propagator: Propagator | None = None) -> complex:
    """``<z^{(x)(k-m)}, U(t)^* b^Wick U(t) z^{(x)k}>`` by exact propagation."""
    if k - m < 0:
        raise ValueError("k - m must be non-negative")
    U = Propagator(space, model) if propagator is None else propagator
    left = U.apply(hermite_state(space, z, k - m), t)
    right = U.apply(hermite_state(space, z, k), t)
    return complex(np.vdot(left.coeffs, wick_quantize(space, b).matrix @ right.coeffs))


def dyson_expansion(model: ModelSpec, b: PolySymbol, z, k: int, t: float, ell: int = 1,
                    n_cut: int = 4, quad_order: int = 16, delta: float = 0.0) -> dict:
    """Coefficients ``beta^(r)``, ``r < ell``, of the expansion of the
    evolved matrix element in powers of ``eps``.

    For ``|z| != 1`` each term carries the overlap factor ``|z|^{2(k-L)}``
    of the untouched tensor factors, ``L = p + n - r``.

    The ``n``-sum is cut at ``n_cut``; ``tail_bound`` is the geometric
    bound ``|b~| rho^{n_cut+1}/(1-rho)`` with ``rho = 4(1+delta)|t| V``
    (relative to the prefactor).  Outside ``4(1+2 delta)|t| V <= 1`` only
    the limit ``beta^(0) = b(z_t)`` is returned (mode ``"limit-only"``).
    """
    eps = model.epsilon
    hom = b.homogeneity
    if hom is None:
        raise ValueError("expansion needs a homogeneous symbol")
    p, q = hom
    m = p - q
    if k - m < 0:
        raise ValueError("k - m must be non-negative")
    V = model.V_norm
    traj = hartree_flow(model, z, t, max(abs(t) / 400, 1e-4)) if t else None
    zt = np.asarray(z, dtype=complex) if traj is None else traj.z[-1]
    limit = complex(b(zt))
    if 4 * (1 + 2 * delta) * abs(t) * V > 1:
        return {"mode": "limit-only", "betas": [limit], "value": limit, "b_zt": limit,
                "tail_bound": np.inf}
    norm2 = float(np.sum(np.abs(np.asarray(z)) ** 2))
    n_top = min(n_cut, k - p + ell - 1) if ell else 0
    I = simplex_integrals(model, b, z, t, max(n_top, 0), quad_order)
    betas = []
    for r in range(ell):
        acc = 0j
        for n in range(r, min(k - p + r, n_top) + 1):
            L = p + n - r
            logc = 0.5 * (gammaln(k + 1) + gammaln(k - m + 1)
                          + (p + q + 2 * (n - r)) * np.log(eps)) - gammaln(k - L + 1)
            acc += (1j ** n) * np.exp(logc) * I[n, r] * norm2 ** (k - L)
        betas.append(acc)
    rho = 4 * (1 + delta) * abs(t) * V
    tail = b.tensor_norm() * rho ** (n_cut + 1) / (1 - rho) if rho < 1 else np.inf
    value = sum(eps ** r * bt for r, bt in enumerate(betas))
    return {"mode": "series", "betas": betas, "value": value, "b_zt": limit, "tail_bound": tail,
            "prefactor": matrix_element_prefactor(k, m, p, q, eps)}


def falling_factorial_alphas(p: int, n: int, r: int, kappa: float) -> np.ndarray:
    """Coefficients ``alpha_j`` of ``eps^j`` in ``kappa (kappa - eps) ... (kappa - (L-1) eps)``,
    ``L = p + n - r``; index ``j`` runs over ``0..L-1``."""
    if r > n:
        raise ValueError("r must not exceed n")
    L = p + n - r
    coef = np.array([1.0])
    for i in range(L):
        new = np.zeros(coef.size + 1)
        new[:-1] += kappa * coef
        new[1:] -= i * coef
        coef = new
    # coef[j] is the coefficient of eps^j; the one of eps^L vanishes (factor i = 0)
    return coef[:L] if L else coef


@dataclass
class CoherentWickReport:
    epsilons: np.ndarray
    values: np.ndarray
    target: complex
    residuals: np.ndarray
    inversions: int

    @property
    def monotone(self) -> bool:
        return self.inversions <= 1


def count_inversions(residuals) -> int:
    """Number of consecutive increases in a sequence expected to decrease."""
    r = np.asarray(residuals, dtype=float)
    return int(np.sum(np.diff(r) > 0))


def coherent_n_max(z0, epsilon: float, tol: float = 1e-14, extra: int = 0) -> int:
    """Smallest truncation whose Poisson tail for ``E(z0)`` is below ``tol``."""
    mu = float(np.sum(np.abs(np.asarray(z0)) ** 2)) / epsilon
    return poisson_cutoff(mu, tol) + extra


def coherent_wick_limit(model: ModelSpec, z0, b: PolySymbol, t: float, eps_grid,
                        tol: float = 1e-14) -> CoherentWickReport:
    """``<U E(z0), b^Wick U E(z0)>`` per ``eps`` against ``b(z_t)``."""
    z0 = np.atleast_1d(np.asarray(z0, dtype=complex))
    traj = hartree_flow(model, z0, t, max(abs(t) / 400, 1e-4)) if t else None
    zt = z0 if traj is None else traj.z[-1]
    target = complex(b(zt))
    vals = []
    for eps in eps_grid:
        n_max = coherent_n_max(z0, eps, tol, extra=b.max_degree())
        mdl = model.with_epsilon(eps, n_max)
        space = mdl.space()
        psi = Propagator(space, mdl).apply(coherent_state(space, z0, tol=tol), t)
        vals.append(np.vdot(psi.coeffs, wick_quantize(space, b).matrix @ psi.coeffs))
    vals = np.array(vals)
    res = np.abs(vals - target)
    return CoherentWickReport(np.asarray(eps_grid, float), vals, target, res, count_inversions(res))
