"""Ideal Bose gas on the torus in the grand-canonical ensemble.

Modes ``n`` in ``Z^d`` have rescaled energies ``c |n|^2`` with
``c = 4 pi^2 beta eps^{2/d}``.  The rescaled density at fugacity ``z`` is
``eps sum_{n != 0} z e^{-c|n|^2} / (1 - z e^{-c|n|^2})``; lattice sums are
evaluated through the multiplicities of ``|n|^2`` and carry an explicit
bound on the part outside the summation box.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .special import polylog_gaussian_series

LATTICE_TOL = 1e-10
CONSTRAINT_TOL = 1e-12


@dataclass(frozen=True)
class BecParams:
    """Physical dimension, inverse temperature, target density and ``eps``."""

    d_phys: int
    beta: float
    nu: float
    epsilon: float
    lattice_cutoff: int | None = None

    def __post_init__(self):
        if self.d_phys < 1 or self.beta <= 0 or self.nu <= 0 or self.epsilon <= 0:
            raise ValueError("d_phys >= 1 and positive beta, nu, epsilon are required")

    @property
    def c(self) -> float:
        return 4 * np.pi ** 2 * self.beta * self.epsilon ** (2.0 / self.d_phys)


def _box_tail_bound(c: float, d: int, M: int, eps: float) -> float:
    """Bound on ``eps sum_{n outside [-M, M]^d} e^{-c|n|^2} / (1 - e^{-c})``.

    Uses ``sum_{|k| > M} e^{-c k^2} <= e^{-c M^2} / (c M)`` and
    ``sum_k e^{-c k^2} <= 1 + sqrt(pi / c)``.
    """
    one = np.exp(-c * M * M) / (c * M)
    full = 1 + np.sqrt(np.pi / c)
    return float(eps * d * one * full ** (d - 1) / -np.expm1(-c))


def lattice_cutoff(c: float, d: int, eps: float, tol: float = LATTICE_TOL) -> int:
    """Smallest box half-width whose tail bound is below ``tol``."""
    M = 1
    while _box_tail_bound(c, d, M, eps) > tol:
        M += 1
    return M


@lru_cache(maxsize=64)
def shell_multiplicities(d: int, M: int) -> np.ndarray:
    """``r[m] = #{n in [-M, M]^d : |n|^2 = m}``."""
    one = np.zeros(M * M + 1, dtype=np.int64)
    k = np.arange(-M, M + 1)
    np.add.at(one, k * k, 1)
    out = np.array([1], dtype=np.int64)
    for _ in range(d):
        out = np.convolve(out, one)
    return out


def _occupation(x, w):
    """``z e^{-x} / (1 - z e^{-x})`` with ``z = 1 - w``, accurate for ``z`` near 1."""
    ex = np.exp(-x)
    return (1 - w) * ex / (-np.expm1(-x) + w * ex)


def _shells(params: BecParams):
    c = params.c
    M = params.lattice_cutoff or lattice_cutoff(c, params.d_phys, params.epsilon)
    r = shell_multiplicities(params.d_phys, M)
    m = np.nonzero(r)[0]
    m = m[m > 0]
    return c * m, r[m].astype(float), _box_tail_bound(c, params.d_phys, M, params.epsilon)


def nu_eps(params: BecParams, z: float, *, w: float | None = None) -> tuple[float, float]:
    """Rescaled density of the non-zero modes at fugacity ``z``.

    ``w = 1 - z`` may be passed directly for accuracy near ``z = 1``.

    Returns
    -------
    value, tail_bound
    """
    w = 1.0 - z if w is None else w
    if not 0 < w <= 1:
        raise ValueError("fugacity must lie in (0, 1)")
    x, mult, tail = _shells(params)
    return float(params.epsilon * np.sum(mult * _occupation(x, w))), tail


def nu_zero(d_phys: int, beta: float, z: float) -> tuple[float, float]:
    """``sum_k z^k (4 pi beta k)^{-d/2}`` with a tail bound."""
    if z == 1 and d_phys < 3:
        raise ValueError("no condensation threshold for d_phys < 3")
    return polylog_gaussian_series(d_phys / 2, z, scale=4 * np.pi * beta)


def nu_crit(d_phys: int, beta: float) -> float:
    """Critical density ``zeta(d/2) (4 pi beta)^{-d/2}``."""
    return nu_zero(d_phys, beta, 1.0)[0]


@dataclass
class FugacitySolution:
    z: float
    w: float
    condensate: float
    residual: float
    tail_bound: float


def solve_fugacity(params: BecParams) -> FugacitySolution:
    """Solve ``eps z/(1-z) + nu_eps(z) = nu`` by bisection in ``log(1 - z)``.

    The map is strictly decreasing in ``w = 1 - z``; iteration stops once
    the constraint residual is below 1e-12 or the bracket cannot shrink.
    """
    eps, nu = params.epsilon, params.nu

    def F(w):
        return eps * (1 - w) / w + nu_eps(params, 0.0, w=w)[0] - nu

    lo, hi = np.log(1e-300), 0.0   # F(e^lo) > 0 > F(1) = -nu
    best = None
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        w = float(np.exp(mid))
        val = F(w)
        if best is None or abs(val) < abs(best[1]):
            best = (w, val)
        if abs(val) <= CONSTRAINT_TOL or mid in (lo, hi):
            break
        if val > 0:
            lo = mid
        else:
            hi = mid
    w, val = best
    tail = nu_eps(params, 0.0, w=w)[1]
    return FugacitySolution(1 - w, w, eps * (1 - w) / w, abs(val), tail)


def condensate_fraction(d_phys: int, beta: float, nu: float) -> float:
    """``max(0, 1 - nu_crit / nu)``."""
    return max(0.0, 1.0 - nu_crit(d_phys, beta) / nu)


def _modes(f: dict) -> tuple[list, np.ndarray]:
    keys = [tuple(int(x) for x in k) for k in f]
    return keys, np.array([complex(f[k]) for k in f])


def bec_char(params: BecParams, f: dict, sol: FugacitySolution | None = None) -> complex:
    """``G_eps(f)`` for a finite Fourier coefficient map ``f: n -> f_n``.

    ``exp(-eps pi^2 |f|^2) exp(-eps pi^2 sum_n |f_n|^2 occ_n)`` with the
    occupation ``occ_n = z e^{-c|n|^2}/(1 - z e^{-c|n|^2})``.
    """
    sol = solve_fugacity(params) if sol is None else sol
    keys, vals = _modes(f)
    n2 = np.array([sum(x * x for x in k) for k in keys], dtype=float)
    occ = _occupation(params.c * n2, sol.w)
    a2 = np.abs(vals) ** 2
    eps = params.epsilon
    return complex(np.exp(-eps * np.pi ** 2 * np.sum(a2) - eps * np.pi ** 2 * np.sum(a2 * occ)))


def bec_limit_char(f: dict, beta: float, nu: float, d_phys: int) -> complex:
    """``exp(-pi^2 (nu - nu_crit) |f_0|^2)`` above the critical density, else 1."""
    nc = nu_crit(d_phys, beta)
    if nu <= nc:
        return 1.0 + 0j
    f0 = complex(f.get((0,) * d_phys, 0.0))
    return complex(np.exp(-np.pi ** 2 * (nu - nc) * abs(f0) ** 2))


__all__ = [
    "BecParams", "lattice_cutoff", "shell_multiplicities", "nu_eps", "nu_zero", "nu_crit",
    "FugacitySolution", "solve_fugacity", "condensate_fraction", "bec_char", "bec_limit_char",
]
