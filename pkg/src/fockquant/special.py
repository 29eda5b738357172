"""Hermite and Laguerre polynomials and the zeta-type series used by the BEC module.

Coefficients are produced by the three-term recurrences in exact integer or
rational arithmetic; numerical evaluation uses the same recurrences in
floating point.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def hermite_coefficients(n: int) -> tuple[int, ...]:
    """Integer coefficients of the physicists' Hermite polynomial ``h_n``.

    Entry ``k`` is the coefficient of ``x^k``.  Built from
    ``h_{n+1} = 2x h_n - 2n h_{n-1}``.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return (1,)
    prev, cur = [1], [0, 2]
    for m in range(1, n):
        nxt = [0] * (m + 2)
        for k, c in enumerate(cur):
            nxt[k + 1] += 2 * c
        for k, c in enumerate(prev):
            nxt[k] -= 2 * m * c
        prev, cur = cur, nxt
    return tuple(cur)


def hermite_h(n: int, x):
    """``h_n(x)`` by recurrence; ``x`` may be complex or an array."""
    x = np.asarray(x, dtype=complex if np.iscomplexobj(x) else float)
    if n == 0:
        return np.ones_like(x)
    prev, cur = np.ones_like(x), 2 * x
    for m in range(1, n):
        prev, cur = cur, 2 * x * cur - 2 * m * prev
    return cur


@lru_cache(maxsize=None)
def laguerre_coefficients(k: int, alpha: int) -> tuple[Fraction, ...]:
    """Rational coefficients of ``L_k^{(alpha)}`` from the three-term recurrence.

    ``(m+1) L_{m+1} = (2m + 1 + alpha - x) L_m - (m + alpha) L_{m-1}``.
    """
    if k < 0 or alpha < 0:
        raise ValueError("k and alpha must be non-negative")
    prev = [Fraction(1)]
    if k == 0:
        return tuple(prev)
    cur = [Fraction(1 + alpha), Fraction(-1)]
    for m in range(1, k):
        nxt = [Fraction(0)] * (m + 2)
        for i, c in enumerate(cur):
            nxt[i] += (2 * m + 1 + alpha) * c
            nxt[i + 1] -= c
        for i, c in enumerate(prev):
            nxt[i] -= (m + alpha) * c
        prev, cur = cur, [c / (m + 1) for c in nxt]
    return tuple(cur)


def laguerre_l(k: int, alpha: int, x):
    """Generalized Laguerre polynomial ``L_k^{(alpha)}(x)`` by recurrence."""
    x = np.asarray(x, dtype=float)
    if k == 0:
        return np.ones_like(x)
    prev, cur = np.ones_like(x), 1.0 + alpha - x
    for m in range(1, k):
        prev, cur = cur, ((2 * m + 1 + alpha - x) * cur - (m + alpha) * prev) / (m + 1)
    return cur


def polylog_gaussian_series(s: float, z: float, scale: float = 1.0,
                            n_terms: int = 2000) -> tuple[float, float]:
    """``sum_{k>=1} z^k (scale k)^{-s}`` with a rigorous tail bound.

    For ``z < 1`` the tail after ``K`` terms is bounded by the geometric
    series.  For ``z = 1`` (which needs ``s > 1``) the tail is the
    Euler-Maclaurin expansion with two correction terms; the reported bound
    is the size of the next Bernoulli term.

    Returns
    -------
    value, tail_bound
    """
    if not 0 <= z <= 1:
        raise ValueError("z must lie in [0, 1]")
    if z == 1 and s <= 1:
        raise ValueError("series diverges for z = 1 and s <= 1")
    k = np.arange(1, n_terms + 1, dtype=float)
    terms = np.exp(k * np.log(z) - s * np.log(k)) if z > 0 else np.zeros_like(k)
    head = float(np.sum(terms[::-1]))
    K = float(n_terms)
    if z < 1:
        tail = z ** (K + 1) * (K + 1) ** (-s) / (1 - z)
        return head * scale ** (-s), tail * scale ** (-s)
    # sum_{k>K} k^{-s} = K^{1-s}/(s-1) - K^{-s}/2 + s K^{-s-1}/12 + R,
    # |R| <= s(s+1)(s+2) K^{-s-3} / 720
    tail = K ** (1 - s) / (s - 1) - 0.5 * K ** (-s) + s * K ** (-s - 1) / 12
    bound = s * (s + 1) * (s + 2) * K ** (-s - 3) / 720
    return (head + tail) * scale ** (-s), bound * scale ** (-s)
