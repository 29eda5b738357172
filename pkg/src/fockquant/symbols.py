"""Polynomial symbols on C^d and their Wick quantization.

A symbol is ``b(z) = sum c[beta, gamma] conj(z)^beta z^gamma``.  The
``conj(z)`` part carries the creation degree ``q = |beta|`` and the ``z``
part the annihilation degree ``p = |gamma|``, so that

    b^Wick = sum c[beta, gamma] (a^*)^beta a^gamma

maps block ``n`` to block ``n + q - p``.
"""
from __future__ import annotations

import json
from collections import defaultdict
from math import factorial

import numpy as np
import scipy.sparse as sp
from scipy.special import gammaln

from .fock import (BlockOperator, FockSpace, TruncationError, block_basis,
                   coherent_state)

Monomial = tuple[tuple[int, ...], tuple[int, ...]]


def _mfact(alpha) -> int:
    out = 1
    for a in alpha:
        out *= factorial(a)
    return out


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def bounded_compositions(k: int, bound):
    """All ``mu`` with ``|mu| = k`` and ``0 <= mu <= bound`` componentwise."""
    bound = tuple(bound)
    if not bound:
        if k == 0:
            yield ()
        return
    for first in range(min(k, bound[0]), -1, -1):
        for rest in bounded_compositions(k - first, bound[1:]):
            yield (first,) + rest


class PolySymbol:
    """Finitely supported polynomial in ``(conj(z), z)``.

    Parameters
    ----------
    d : int
        Dimension of ``z``.
    terms : dict
        Map ``(beta, gamma) -> c`` with ``beta, gamma`` tuples of length
        ``d``.  Zero coefficients are dropped.
    """

    __slots__ = ("d", "terms")

    def __init__(self, d: int, terms=None):
        self.d = int(d)
        clean = {}
        for (beta, gamma), c in (terms or {}).items():
            beta, gamma = tuple(int(x) for x in beta), tuple(int(x) for x in gamma)
            if len(beta) != self.d or len(gamma) != self.d:
                raise ValueError("multi-index length does not match d")
            c = complex(c)
            if c != 0:
                clean[(beta, gamma)] = clean.get((beta, gamma), 0) + c
        self.terms = {k: v for k, v in clean.items() if v != 0}

    # -- constructors ---------------------------------------------------
    @classmethod
    def zero(cls, d):
        return cls(d)

    @classmethod
    def constant(cls, d, c=1.0):
        z = (0,) * d
        return cls(d, {(z, z): c})

    @classmethod
    def number(cls, d):
        """``|z|^2``."""
        return cls.quadratic_form(np.eye(d))

    @classmethod
    def quadratic_form(cls, A):
        """``<z, A z> = sum_ij A_ij conj(z_i) z_j``."""
        A = np.atleast_2d(np.asarray(A, dtype=complex))
        d = A.shape[0]
        e = np.eye(d, dtype=int)
        return cls(d, {(tuple(e[i]), tuple(e[j])): A[i, j]
                       for i in range(d) for j in range(d)})

    @classmethod
    def annihilation(cls, xi):
        """``<xi, z> = sum_j conj(xi_j) z_j``; quantizes to ``a(xi)``."""
        xi = np.atleast_1d(np.asarray(xi, dtype=complex))
        d = xi.size
        e, zero = np.eye(d, dtype=int), (0,) * d
        return cls(d, {(zero, tuple(e[j])): np.conj(xi[j]) for j in range(d)})

    @classmethod
    def creation(cls, xi):
        """``<z, xi> = sum_j conj(z_j) xi_j``; quantizes to ``a^*(xi)``."""
        return cls.annihilation(xi).conj()

    @classmethod
    def from_tensor(cls, T, p: int, q: int, d: int):
        """Symbol of the operator ``T`` from block ``p`` to block ``q``.

        ``T`` is given in the occupation bases of ``vee^p C^d`` and
        ``vee^q C^d``; ``b(z) = <z^{(x)q}, T z^{(x)p}>``.
        """
        T = np.asarray(T, dtype=complex)
        bq, bp = block_basis(q, d), block_basis(p, d)
        if T.shape != (bq.shape[0], bp.shape[0]):
            raise ValueError("tensor shape does not match the block dimensions")
        wq = np.array([np.sqrt(factorial(q) / _mfact(b)) for b in bq])
        wp = np.array([np.sqrt(factorial(p) / _mfact(g)) for g in bp])
        C = T * np.outer(wq, wp)
        return cls(d, {(tuple(bq[i]), tuple(bp[j])): C[i, j]
                       for i in range(len(bq)) for j in range(len(bp)) if C[i, j] != 0})

    # -- basic structure ------------------------------------------------
    def __repr__(self):
        return f"PolySymbol(d={self.d}, terms={len(self.terms)}, bidegrees={sorted(self.bidegrees())})"

    def __len__(self):
        return len(self.terms)

    def bidegrees(self) -> set[tuple[int, int]]:
        """Set of ``(p, q)`` pairs present."""
        return {(sum(g), sum(b)) for (b, g) in self.terms}

    @property
    def homogeneity(self):
        """``(p, q)`` when every term has the same bidegree, else ``None``."""
        degs = self.bidegrees()
        if len(degs) == 1:
            return next(iter(degs))
        if not degs:
            return (0, 0)
        return None

    def max_degree(self) -> int:
        return max((p + q for p, q in self.bidegrees()), default=0)

    def part(self, p: int, q: int) -> "PolySymbol":
        return PolySymbol(self.d, {k: v for k, v in self.terms.items()
                                   if sum(k[1]) == p and sum(k[0]) == q})

    def total_degree_part(self, m: int) -> "PolySymbol":
        return PolySymbol(self.d, {k: v for k, v in self.terms.items()
                                   if sum(k[0]) + sum(k[1]) == m})

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(c) <= tol for c in self.terms.values())

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    # -- arithmetic -----------------------------------------------------
    def conj(self) -> "PolySymbol":
        """Complex conjugate symbol ``conj(b(z))``."""
        return PolySymbol(self.d, {(g, b): np.conj(c) for (b, g), c in self.terms.items()})

    def __add__(self, other):
        if not isinstance(other, PolySymbol):
            other = PolySymbol.constant(self.d, other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return PolySymbol(self.d, out)

    __radd__ = __add__

    def __neg__(self):
        return PolySymbol(self.d, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, PolySymbol) else -other)

    def __mul__(self, other):
        if isinstance(other, PolySymbol):
            out = defaultdict(complex)
            for (b1, g1), c1 in self.terms.items():
                for (b2, g2), c2 in other.terms.items():
                    out[(_add(b1, b2), _add(g1, g2))] += c1 * c2
            return PolySymbol(self.d, out)
        return PolySymbol(self.d, {k: other * v for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = PolySymbol.constant(self.d)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def allclose(self, other: "PolySymbol", atol: float = 1e-12) -> bool:
        keys = set(self.terms) | set(other.terms)
        return all(abs(self.terms.get(k, 0) - other.terms.get(k, 0)) <= atol for k in keys)

    # -- evaluation -----------------------------------------------------
    def __call__(self, z):
        return evaluate(self, z)

    def d_z(self, mu) -> "PolySymbol":
        """``partial_z^mu b``."""
        mu = tuple(mu)
        out = {}
        for (b, g), c in self.terms.items():
            if all(x >= m for x, m in zip(g, mu)):
                out[(b, _sub(g, mu))] = c * _mfact(g) / _mfact(_sub(g, mu))
        return PolySymbol(self.d, out)

    def d_zbar(self, mu) -> "PolySymbol":
        """``partial_{conj z}^mu b``."""
        mu = tuple(mu)
        out = {}
        for (b, g), c in self.terms.items():
            if all(x >= m for x, m in zip(b, mu)):
                out[(_sub(b, mu), g)] = c * _mfact(b) / _mfact(_sub(b, mu))
        return PolySymbol(self.d, out)

    # -- tensor form ----------------------------------------------------
    def to_tensor(self) -> np.ndarray:
        """Operator ``b~`` from ``vee^p`` to ``vee^q`` in occupation bases."""
        hom = self.homogeneity
        if hom is None:
            raise ValueError("tensor form needs a homogeneous symbol")
        p, q = hom
        bq, bp = block_basis(q, self.d), block_basis(p, self.d)
        iq = {tuple(b): i for i, b in enumerate(bq.tolist())}
        ip = {tuple(g): j for j, g in enumerate(bp.tolist())}
        T = np.zeros((len(bq), len(bp)), dtype=complex)
        for (b, g), c in self.terms.items():
            T[iq[b], ip[g]] = c * np.sqrt(_mfact(b) * _mfact(g) / (factorial(q) * factorial(p)))
        return T

    def tensor_norm(self) -> float:
        """``|b~|`` as the largest singular value of the tensor form."""
        T = self.to_tensor()
        return float(np.linalg.norm(T, 2)) if T.size else 0.0

    # -- serialization --------------------------------------------------
    def to_json(self) -> str:
        """``{"terms": [[beta, gamma, re, im], ...], "p": .., "q": ..}``."""
        hom = self.homogeneity
        doc = {"d": self.d,
               "terms": [[list(b), list(g), c.real, c.imag]
                         for (b, g), c in sorted(self.terms.items())],
               "p": None if hom is None else hom[0],
               "q": None if hom is None else hom[1]}
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "PolySymbol":
        doc = json.loads(text)
        terms = doc["terms"]
        d = doc.get("d") or (len(terms[0][0]) if terms else 1)
        b = cls(d, {(tuple(t[0]), tuple(t[1])): t[2] + 1j * t[3] for t in terms})
        if doc.get("p") is not None and b.terms and b.homogeneity != (doc["p"], doc["q"]):
            raise ValueError("homogeneity tag does not match the stored terms")
        return b


class GradedSymbol:
    """Polynomial in ``eps`` with :class:`PolySymbol` coefficients.

    ``grades[r]`` is the coefficient of ``eps^r``.
    """

    def __init__(self, d: int, grades=None):
        self.d = d
        self.grades = {int(r): s for r, s in (grades or {}).items() if len(s)}

    @classmethod
    def lift(cls, b):
        if isinstance(b, GradedSymbol):
            return b
        return cls(b.d, {0: b})

    def __repr__(self):
        return f"GradedSymbol(d={self.d}, grades={sorted(self.grades)})"

    def grade(self, r: int) -> PolySymbol:
        return self.grades.get(r, PolySymbol.zero(self.d))

    def __add__(self, other):
        other = GradedSymbol.lift(other)
        out = dict(self.grades)
        for r, s in other.grades.items():
            out[r] = out[r] + s if r in out else s
        return GradedSymbol(self.d, out)

    def __mul__(self, c):
        return GradedSymbol(self.d, {r: c * s for r, s in self.grades.items()})

    __rmul__ = __mul__

    def shift(self, k: int) -> "GradedSymbol":
        """Multiply by ``eps^k``."""
        return GradedSymbol(self.d, {r + k: s for r, s in self.grades.items()})

    def collapse(self, epsilon: float) -> PolySymbol:
        """Evaluate the ``eps`` polynomial at a number."""
        out = PolySymbol.zero(self.d)
        for r, s in self.grades.items():
            out = out + (epsilon ** r) * s
        return out

    def evaluate(self, z, epsilon: float):
        return self.collapse(epsilon)(z)


# ----------------------------------------------------------------------
# evaluation and quantization


def evaluate(b: PolySymbol, z):
    """``b(z)``; ``z`` may carry leading batch axes."""
    z = np.asarray(z, dtype=complex)
    zc = np.conj(z)
    out = np.zeros(z.shape[:-1], dtype=complex)
    for (beta, gamma), c in b.terms.items():
        out = out + c * np.prod(zc ** np.array(beta) * z ** np.array(gamma), axis=-1)
    return out if out.ndim else complex(out)


def compile_symbol(b: PolySymbol):
    """Fast evaluator ``z -> b(z)`` for a single point ``z`` of shape ``(d,)``."""
    if not b.terms:
        return lambda z: 0j
    keys = list(b.terms)
    B = np.array([k[0] for k in keys])
    G = np.array([k[1] for k in keys])
    c = np.array([b.terms[k] for k in keys])

    def f(z):
        z = np.asarray(z, dtype=complex)
        return complex(c @ np.prod(np.conj(z) ** B * z ** G, axis=1))
    return f


def _monomial_entries(space: FockSpace, beta, gamma):
    """Sparse entries of ``(a^*)^beta a^gamma`` (without the coefficient)."""
    beta, gamma = np.array(beta), np.array(gamma)
    p, q = int(gamma.sum()), int(beta.sum())
    basis = space.basis
    mask = np.all(basis >= gamma, axis=1) & (space.numbers - p + q <= space.n_max)
    src = np.nonzero(mask)[0]
    mid = basis[src] - gamma
    top = mid + beta
    tgt = space.index_of(top)
    logv = 0.5 * (gammaln(basis[src] + 1).sum(axis=1) + gammaln(top + 1).sum(axis=1)
                  - 2 * gammaln(mid + 1).sum(axis=1))
    vals = space.epsilon ** ((p + q) / 2) * np.exp(logv)
    return tgt, src, vals


def wick_quantize(space: FockSpace, b) -> BlockOperator:
    """Normal-ordered quantization ``b^Wick`` on the truncated space.

    ``b`` is a :class:`PolySymbol` or a :class:`GradedSymbol` (grades are
    summed with the space's epsilon).  Entries are exact on every block
    whose image stays within ``n_max``.

    Raises
    ------
    TruncationError
        When the creation or annihilation degree exceeds ``n_max``.
    """
    if isinstance(b, GradedSymbol):
        b = b.collapse(space.epsilon)
    if b.d != space.d:
        raise ValueError("symbol dimension does not match the space")
    if any(max(p, q) > space.n_max for p, q in b.bidegrees()):
        raise TruncationError("degree exceeds truncation window")
    rows, cols, vals = [], [], []
    for (beta, gamma), c in b.terms.items():
        r, s, v = _monomial_entries(space, beta, gamma)
        rows.append(r)
        cols.append(s)
        vals.append(c * v)
    offsets = {q - p for p, q in b.bidegrees()}
    offset = offsets.pop() if len(offsets) == 1 else (0 if not offsets else None)
    if not rows:
        return BlockOperator(space, sp.csr_matrix((space.dim, space.dim), dtype=complex), offset)
    m = sp.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                      shape=(space.dim, space.dim)).tocsr()
    return BlockOperator(space, m, offset)


# ----------------------------------------------------------------------
# symbolic calculus


def derivative_pairing(b1: PolySymbol, b2: PolySymbol, k: int) -> PolySymbol:
    """``partial_z^k b1 . partial_zbar^k b2``.

    Equals ``sum_{|mu| = k} k!/mu! (partial_z^mu b1)(partial_zbar^mu b2)``,
    the symbol of the ``k``-fold contraction of the tensor forms.
    """
    if k == 0:
        return b1 * b2
    out = defaultdict(complex)
    kf = factorial(k)
    for (be1, g1), c1 in b1.terms.items():
        for (be2, g2), c2 in b2.terms.items():
            bound = tuple(min(x, y) for x, y in zip(g1, be2))
            if sum(bound) < k:
                continue
            for mu in bounded_compositions(k, bound):
                w = (kf / _mfact(mu)) * (_mfact(g1) / _mfact(_sub(g1, mu))) \
                    * (_mfact(be2) / _mfact(_sub(be2, mu)))
                key = (_add(be1, _sub(be2, mu)), _add(_sub(g1, mu), g2))
                out[key] += w * c1 * c2
    return PolySymbol(b1.d, out)


def poisson_bracket(b1: PolySymbol, b2: PolySymbol, k: int = 1) -> PolySymbol:
    """``{b1, b2}^(k) = d^k b1 . dbar^k b2 - d^k b2 . dbar^k b1``."""
    return derivative_pairing(b1, b2, k) - derivative_pairing(b2, b1, k)


def _max_contraction(b1: PolySymbol, b2: PolySymbol) -> int:
    p1 = max((p for p, _ in b1.bidegrees()), default=0)
    q2 = max((q for _, q in b2.bidegrees()), default=0)
    return min(p1, q2)


def wick_product(b1, b2) -> GradedSymbol:
    """Symbol of ``b1^Wick b2^Wick``: ``sum_k eps^k/k! d^k b1 . dbar^k b2``."""
    g1, g2 = GradedSymbol.lift(b1), GradedSymbol.lift(b2)
    out = GradedSymbol(g1.d)
    for r1, s1 in g1.grades.items():
        for r2, s2 in g2.grades.items():
            for k in range(_max_contraction(s1, s2) + 1):
                term = derivative_pairing(s1, s2, k) * (1.0 / factorial(k))
                out = out + GradedSymbol(g1.d, {r1 + r2 + k: term})
    return out


def wick_commutator(b1, b2) -> GradedSymbol:
    """Symbol of ``[b1^Wick, b2^Wick]``: ``sum_{k>=1} eps^k/k! {b1, b2}^(k)``."""
    g1, g2 = GradedSymbol.lift(b1), GradedSymbol.lift(b2)
    out = GradedSymbol(g1.d)
    for r1, s1 in g1.grades.items():
        for r2, s2 in g2.grades.items():
            kmax = max(_max_contraction(s1, s2), _max_contraction(s2, s1))
            for k in range(1, kmax + 1):
                term = poisson_bracket(s1, s2, k) * (1.0 / factorial(k))
                out = out + GradedSymbol(g1.d, {r1 + r2 + k: term})
    return out


def _compose(b: PolySymbol, images: list[PolySymbol]) -> PolySymbol:
    d = b.d
    conj_images = [w.conj() for w in images]
    cache: dict = {}

    def power(j, e, bar):
        key = (j, e, bar)
        if key not in cache:
            base = conj_images[j] if bar else images[j]
            cache[key] = base ** e
        return cache[key]

    out = PolySymbol.zero(images[0].d if images else d)
    for (beta, gamma), c in b.terms.items():
        term = PolySymbol.constant(out.d, c)
        for j in range(d):
            if beta[j]:
                term = term * power(j, beta[j], True)
            if gamma[j]:
                term = term * power(j, gamma[j], False)
        out = out + term
    return out


def substitute(b: PolySymbol, translate=None, linear=None, antilinear=None) -> PolySymbol:
    """Polynomial substitution ``b(B z + B2 conj(z) + z0)``.

    Parameters
    ----------
    translate : array_like, optional
        ``z0``; defaults to 0.
    linear : array_like, optional
        ``B``; defaults to the identity.
    antilinear : array_like, optional
        ``B2``; defaults to 0.

    Returns
    -------
    PolySymbol
        Exact coefficients, generally of mixed bidegree.
    """
    d = b.d
    B = np.eye(d, dtype=complex) if linear is None else np.asarray(linear, dtype=complex)
    B2 = None if antilinear is None else np.asarray(antilinear, dtype=complex)
    z0 = None if translate is None else np.atleast_1d(np.asarray(translate, dtype=complex))
    e, zero = np.eye(d, dtype=int), (0,) * d
    images = []
    for j in range(d):
        terms = {(zero, tuple(e[i])): B[j, i] for i in range(d)}
        if B2 is not None:
            for i in range(d):
                terms[(tuple(e[i]), zero)] = B2[j, i]
        if z0 is not None:
            terms[(zero, zero)] = z0[j]
        images.append(PolySymbol(d, terms))
    return _compose(b, images)


def free_evolved(b: PolySymbol, A, t: float) -> PolySymbol:
    """``b(e^{-itA} z)``."""
    from scipy.linalg import expm
    return substitute(b, linear=expm(-1j * t * np.asarray(A, dtype=complex)))


def wick_symbol_of(space: FockSpace, T, probes, tol: float = 1e-10) -> np.ndarray:
    """``<E(z), T E(z)>`` for each probe ``z`` (rows of ``probes``)."""
    probes = np.atleast_2d(np.asarray(probes, dtype=complex))
    out = np.empty(probes.shape[0], dtype=complex)
    M = T.matrix if hasattr(T, "matrix") else T
    for i, z in enumerate(probes):
        E = coherent_state(space, z, tol=tol)
        out[i] = np.vdot(E.coeffs, M @ E.coeffs)
    return out


def number_estimate_check(space: FockSpace, b: PolySymbol) -> dict:
    """Compare block norms of ``b^Wick`` with ``(j eps)^{q/2} (k eps)^{p/2} |b~|``.

    Returns
    -------
    dict
        ``max_ratio`` over blocks with ``k >= p``, the per-block ratios and
        the largest norm found on blocks ``k < p`` (which must vanish).
    """
    hom = b.homogeneity
    if hom is None:
        raise ValueError("number estimate needs a homogeneous symbol")
    p, q = hom
    eps = space.epsilon
    op = wick_quantize(space, b)
    bt = b.tensor_norm()
    ratios, below = {}, 0.0
    for k in range(space.n_max + 1):
        j = k - p + q
        if j < 0 or j > space.n_max:
            continue
        nrm = float(np.linalg.norm(op.block(k, j), 2))
        if k < p:
            below = max(below, nrm)
            continue
        bound = (j * eps) ** (q / 2) * (k * eps) ** (p / 2) * bt
        ratios[k] = nrm / bound if bound > 0 else (0.0 if nrm == 0 else np.inf)
    return {"max_ratio": max(ratios.values(), default=0.0), "ratios": ratios,
            "below_degree_norm": below}


def random_symbol(rng: np.random.Generator, d: int, p: int, q: int, density: float = 1.0) -> PolySymbol:
    """Random homogeneous symbol in ``P_{p,q}`` with complex normal coefficients."""
    terms = {}
    for beta in block_basis(q, d).tolist():
        for gamma in block_basis(p, d).tolist():
            if density >= 1.0 or rng.random() < density:
                terms[(tuple(beta), tuple(gamma))] = rng.normal() + 1j * rng.normal()
    return PolySymbol(d, terms)


__all__ = [
    "PolySymbol", "GradedSymbol", "evaluate", "compile_symbol", "wick_quantize", "derivative_pairing",
    "poisson_bracket", "wick_product", "wick_commutator", "substitute", "free_evolved",
    "wick_symbol_of", "number_estimate_check", "random_symbol", "bounded_compositions",
]
