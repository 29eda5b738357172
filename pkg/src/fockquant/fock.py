"""Truncated symmetric Fock space over C^d with epsilon-scaled CCR.

States are stored as dense coefficient arrays over the occupation-number
basis ``{alpha in N^d : |alpha| <= n_max}``.  Operators are stored either as
a scipy sparse matrix over the whole truncated basis (``BlockOperator``) or
as a dense array (``DenseOperator``).

Conventions
-----------
* ``<u, v>`` is antilinear in the first argument.
* ``a_j |alpha> = sqrt(eps alpha_j) |alpha - e_j>`` and
  ``a_j^* |alpha> = sqrt(eps (alpha_j + 1)) |alpha + e_j>``; creation out of
  the top block ``n_max`` is truncated to zero.
* ``a(f) = sum_j conj(f_j) a_j`` and ``a^*(f) = sum_j f_j a_j^*``.
* ``Phi(f) = (a^*(f) + a(f)) / sqrt(2)``, ``Pi(f) = Phi(i f)`` and
  ``W(f) = exp(i Phi(f))``.
"""
from __future__ import annotations

import json
from math import comb

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply
from scipy.special import gammaln
from scipy.stats import poisson

DEFAULT_MAX_DIM = 1_000_000


class GuardError(ValueError):
    """Raised when a truncation guard or a precondition is violated."""


class TruncationError(GuardError):
    """Raised when the truncated space is too small or too large."""


def block_dimension(n: int, d: int) -> int:
    """Number of occupation multi-indices with ``|alpha| = n`` in ``N^d``."""
    return comb(n + d - 1, d - 1)


def total_dimension(d: int, n_max: int) -> int:
    return comb(n_max + d, d)


def block_basis(n: int, d: int) -> np.ndarray:
    """Occupation multi-indices of block ``n`` in graded-lex order.

    Within a block the order is lexicographically decreasing, so block
    ``n`` starts with ``(n, 0, ..., 0)`` and ends with ``(0, ..., 0, n)``.
    """
    if d == 1:
        return np.array([[n]], dtype=np.int64)
    parts = []
    for a in range(n, -1, -1):
        rest = block_basis(n - a, d - 1)
        head = np.full((rest.shape[0], 1), a, dtype=np.int64)
        parts.append(np.hstack([head, rest]))
    return np.vstack(parts)


class FockSpace:
    """Truncated symmetric Fock space over ``C^d``.

    Parameters
    ----------
    d : int
        Dimension of the one-particle space.
    n_max : int
        Largest particle number kept.
    epsilon : float
        Semiclassical parameter.
    max_dim : int, optional
        Memory cap on the total dimension.

    Notes
    -----
    Instances are treated as immutable.  Lazily computed ladder matrices
    are cached on the instance.
    """

    def __init__(self, d: int, n_max: int, epsilon: float, max_dim: int = DEFAULT_MAX_DIM):
        if int(d) != d or d < 1:
            raise ValueError("d must be a positive integer")
        if int(n_max) != n_max or n_max < 0:
            raise ValueError("n_max must be a non-negative integer")
        if not epsilon > 0:
            raise ValueError("epsilon must be positive")
        self.d = int(d)
        self.n_max = int(n_max)
        self.epsilon = float(epsilon)
        dim = total_dimension(self.d, self.n_max)
        if dim > max_dim:
            raise TruncationError(
                f"truncation too large: dimension {dim} exceeds cap {max_dim}")
        self.dim = dim
        self.block_sizes = np.array([block_dimension(n, self.d) for n in range(self.n_max + 1)])
        self.offsets = np.concatenate([[0], np.cumsum(self.block_sizes)])
        self.basis = np.vstack([block_basis(n, self.d) for n in range(self.n_max + 1)])
        self.numbers = self.basis.sum(axis=1)
        self._ladder_cache: dict[int, sp.csr_matrix] = {}
        self._setup_index()

    def __repr__(self) -> str:
        return f"FockSpace(d={self.d}, n_max={self.n_max}, epsilon={self.epsilon:g})"

    # ------------------------------------------------------------------
    # basis bookkeeping
    def _setup_index(self):
        base = self.n_max + 1
        if self.d * np.log2(base) < 62:
            self._radix = base ** np.arange(self.d - 1, -1, -1, dtype=np.int64)
            keys = self.basis @ self._radix
            self._key_order = np.argsort(keys, kind="stable")
            self._sorted_keys = keys[self._key_order]
            self._lookup = None
        else:
            self._radix = None
            self._lookup = {tuple(a): i for i, a in enumerate(self.basis.tolist())}

    def block(self, n: int) -> slice:
        """Slice of the basis belonging to particle number ``n``."""
        return slice(int(self.offsets[n]), int(self.offsets[n + 1]))

    def index_of(self, alphas) -> np.ndarray:
        """Positions of multi-indices in the basis, ``-1`` when absent."""
        alphas = np.atleast_2d(np.asarray(alphas, dtype=np.int64))
        valid = np.all(alphas >= 0, axis=1) & (alphas.sum(axis=1) <= self.n_max)
        out = np.full(alphas.shape[0], -1, dtype=np.int64)
        if not valid.any():
            return out
        if self._lookup is not None:
            for i in np.nonzero(valid)[0]:
                out[i] = self._lookup[tuple(alphas[i])]
            return out
        keys = alphas[valid] @ self._radix
        pos = np.searchsorted(self._sorted_keys, keys)
        out[valid] = self._key_order[pos]
        return out

    def guarded_indices(self, margin: int) -> np.ndarray:
        """Basis positions with particle number ``<= n_max - margin``."""
        return np.nonzero(self.numbers <= self.n_max - margin)[0]

    # ------------------------------------------------------------------
    def lowering(self, j: int) -> sp.csr_matrix:
        """Unscaled annihilation matrix ``b_j`` (``a_j = sqrt(eps) b_j``)."""
        if j not in self._ladder_cache:
            src = np.nonzero(self.basis[:, j] > 0)[0]
            tgt_alpha = self.basis[src].copy()
            tgt_alpha[:, j] -= 1
            tgt = self.index_of(tgt_alpha)
            vals = np.sqrt(self.basis[src, j].astype(float))
            self._ladder_cache[j] = sp.csr_matrix(
                (vals, (tgt, src)), shape=(self.dim, self.dim))
        return self._ladder_cache[j]


def make_space(d: int, n_max: int, epsilon: float, max_dim: int = DEFAULT_MAX_DIM) -> FockSpace:
    """Build a truncated Fock space; see :class:`FockSpace`."""
    return FockSpace(d, n_max, epsilon, max_dim=max_dim)


# ----------------------------------------------------------------------
# vectors


class FockVector:
    """A vector of the truncated Fock space.

    Parameters
    ----------
    space : FockSpace
    coeffs : array_like
        Complex amplitudes over ``space.basis``.
    tail_mass : float
        L2 mass of the analytic state that lies above ``n_max``.
    """

    def __init__(self, space: FockSpace, coeffs, tail_mass: float = 0.0):
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.shape != (space.dim,):
            raise ValueError("coefficient array does not match the space dimension")
        self.space = space
        self.coeffs = coeffs
        self.tail_mass = float(tail_mass)

    def __repr__(self):
        return f"FockVector({self.space!r}, norm={self.norm():.6g}, tail_mass={self.tail_mass:.3g})"

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def inner(self, other: "FockVector") -> complex:
        """``<self, other>``, antilinear in ``self``."""
        return complex(np.vdot(self.coeffs, _coeffs(other)))

    def block(self, n: int) -> np.ndarray:
        return self.coeffs[self.space.block(n)]

    def block_masses(self) -> np.ndarray:
        sq = np.abs(self.coeffs) ** 2
        return np.add.reduceat(sq, self.space.offsets[:-1])

    def normalized(self) -> "FockVector":
        return FockVector(self.space, self.coeffs / self.norm(), self.tail_mass)

    def __add__(self, other):
        return FockVector(self.space, self.coeffs + _coeffs(other), self.tail_mass + getattr(other, "tail_mass", 0.0))

    def __sub__(self, other):
        return FockVector(self.space, self.coeffs - _coeffs(other))

    def __mul__(self, c):
        return FockVector(self.space, c * self.coeffs, self.tail_mass * abs(c) ** 2)

    __rmul__ = __mul__

    def to_json(self) -> str:
        return vector_to_json(self)


def _coeffs(v) -> np.ndarray:
    return v.coeffs if isinstance(v, FockVector) else np.asarray(v)


def top_mass(v, space: FockSpace, width: int | None = None) -> float:
    """Squared norm carried by the top ``width`` blocks of ``v``."""
    if width is None:
        width = max(2, space.n_max // 10)
    mask = space.numbers > space.n_max - width
    return float(np.sum(np.abs(_coeffs(v)[mask]) ** 2))


def vacuum(space: FockSpace) -> FockVector:
    c = np.zeros(space.dim, dtype=complex)
    c[0] = 1.0
    return FockVector(space, c)


def basis_vector(space: FockSpace, alpha) -> FockVector:
    idx = space.index_of([alpha])[0]
    if idx < 0:
        raise TruncationError(f"occupation {tuple(alpha)} is outside the truncated basis")
    c = np.zeros(space.dim, dtype=complex)
    c[idx] = 1.0
    return FockVector(space, c)


def _log_monomials(basis: np.ndarray, z: np.ndarray):
    """Return ``log|prod_j z_j^a_j / sqrt(a_j!)|`` and its phase.

    Entries involving ``z_j = 0`` with ``a_j > 0`` get ``-inf``.
    """
    absz = np.abs(z)
    with np.errstate(divide="ignore"):
        logz = np.log(absz)
    logz = np.where(absz > 0, logz, -np.inf)
    phase = np.angle(z)
    with np.errstate(invalid="ignore"):
        terms = np.where(basis > 0, basis * logz, 0.0)
    logabs = terms.sum(axis=1) - 0.5 * gammaln(basis + 1).sum(axis=1)
    ang = basis @ phase
    return logabs, ang


def _check_z(space: FockSpace, z) -> np.ndarray:
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if z.shape != (space.d,):
        raise ValueError(f"expected a vector of length {space.d}, got shape {z.shape}")
    return z


def hermite_state(space: FockSpace, z, k: int) -> FockVector:
    """Product state ``z^{(x)k}`` in occupation coordinates.

    The coefficient at ``alpha`` (``|alpha| = k``) is
    ``sqrt(k!/alpha!) z^alpha``, so that the norm is ``|z|^k``.
    """
    z = _check_z(space, z)
    if k > space.n_max or k < 0:
        raise TruncationError(f"k={k} outside 0..n_max={space.n_max}")
    sl = space.block(k)
    logabs, ang = _log_monomials(space.basis[sl], z)
    logabs = logabs + 0.5 * gammaln(k + 1)
    c = np.zeros(space.dim, dtype=complex)
    c[sl] = np.exp(logabs + 1j * ang)
    return FockVector(space, c)


def coherent_tail(space: FockSpace, z) -> float:
    """Poisson(|z|^2/eps) probability of particle numbers above ``n_max``."""
    z = _check_z(space, z)
    mu = float(np.vdot(z, z).real) / space.epsilon
    return float(poisson.sf(space.n_max, mu))


def poisson_cutoff(mu: float, tol: float) -> int:
    """Smallest ``n`` with ``P(Poisson(mu) > n) <= tol``."""
    if mu <= 0:
        return 0
    target = np.log(tol)
    n = max(0, int(mu))
    while poisson.logsf(n, mu) > target:
        n += max(1, int(np.sqrt(mu) / 4))
    while n > 0 and poisson.logsf(n - 1, mu) <= target:
        n -= 1
    return n


def coherent_state(space: FockSpace, z, tol: float = 1e-10) -> FockVector:
    """Coherent vector ``E(z)`` truncated at ``n_max``.

    ``E(z) = exp(-|z|^2/(2 eps)) sum_n eps^{-n/2} z^{(x)n} / sqrt(n!)``.

    Raises
    ------
    TruncationError
        When the Poisson tail above ``n_max`` exceeds ``tol``.
    """
    z = _check_z(space, z)
    tail = coherent_tail(space, z)
    if tail > tol:
        raise TruncationError(
            f"truncation insufficient: coherent tail {tail:.3e} exceeds {tol:.1e} "
            f"(mean number {np.vdot(z, z).real / space.epsilon:.3g}, n_max={space.n_max})")
    eps = space.epsilon
    logabs, ang = _log_monomials(space.basis, z / np.sqrt(eps))
    logabs = logabs - np.vdot(z, z).real / (2 * eps)
    return FockVector(space, np.exp(logabs + 1j * ang), tail_mass=tail)


# ----------------------------------------------------------------------
# operators


class _Operator:
    space: FockSpace

    def __matmul__(self, other):
        if isinstance(other, FockVector):
            return FockVector(self.space, self.matrix @ other.coeffs)
        if isinstance(other, _Operator):
            return _wrap(self.space, self.matrix @ other.matrix, _sum_offsets(self, other))
        return self.matrix @ other

    def apply(self, v):
        return self @ v

    def __add__(self, other):
        off = self.offset if getattr(other, "offset", None) == self.offset else None
        return _wrap(self.space, _plus(self.matrix, other.matrix), off)

    def __sub__(self, other):
        return self + (-1.0) * other

    def __mul__(self, c):
        return _wrap(self.space, self.matrix * c, self.offset)

    __rmul__ = __mul__

    def __neg__(self):
        return (-1.0) * self

    def adjoint(self):
        return _wrap(self.space, self.matrix.conj().T, None if self.offset is None else -self.offset)

    def toarray(self) -> np.ndarray:
        m = self.matrix
        return m.toarray() if sp.issparse(m) else np.asarray(m)

    def block(self, n_in: int, n_out: int | None = None) -> np.ndarray:
        """Dense matrix from block ``n_in`` to block ``n_out``.

        ``n_out`` defaults to ``n_in + offset``.
        """
        if n_out is None:
            n_out = n_in + (self.offset or 0)
        m = self.matrix[self.space.block(n_out), self.space.block(n_in)]
        return m.toarray() if sp.issparse(m) else np.asarray(m)

    def restricted_norm(self, cols=None, rows=None) -> float:
        """Spectral norm of the submatrix on selected basis positions."""
        m = self.matrix
        if cols is not None:
            m = m[:, cols]
        if rows is not None:
            m = m[rows]
        m = m.toarray() if sp.issparse(m) else np.asarray(m)
        if m.size == 0:
            return 0.0
        return float(np.linalg.norm(m, 2))

    def to_json(self) -> str:
        return operator_to_json(self)


class BlockOperator(_Operator):
    """Sparse operator over the truncated basis.

    ``offset`` is the particle-number shift ``n -> n + offset`` when the
    operator has one, ``None`` otherwise.
    """

    def __init__(self, space: FockSpace, matrix, offset: int | None = 0):
        self.space = space
        self.matrix = sp.csr_matrix(matrix)
        self.offset = offset

    def __repr__(self):
        return f"BlockOperator({self.space!r}, offset={self.offset}, nnz={self.matrix.nnz})"


class DenseOperator(_Operator):
    """Dense operator over the truncated basis."""

    offset = None

    def __init__(self, space: FockSpace, matrix):
        self.space = space
        self.matrix = np.asarray(matrix, dtype=complex)

    def __repr__(self):
        return f"DenseOperator({self.space!r})"


def _sum_offsets(a, b):
    if a.offset is None or b.offset is None:
        return None
    return a.offset + b.offset


def _plus(m1, m2):
    if sp.issparse(m1) and sp.issparse(m2):
        return m1 + m2
    return _dense(m1) + _dense(m2)


def _dense(m):
    return m.toarray() if sp.issparse(m) else m


def _wrap(space, matrix, offset):
    if sp.issparse(matrix):
        return BlockOperator(space, matrix, offset)
    return DenseOperator(space, matrix)


def identity(space: FockSpace) -> BlockOperator:
    return BlockOperator(space, sp.identity(space.dim, dtype=complex, format="csr"), 0)


def _check_f(space: FockSpace, f) -> np.ndarray:
    f = np.atleast_1d(np.asarray(f, dtype=complex))
    if f.shape != (space.d,):
        raise ValueError(f"dimension mismatch: expected length {space.d}, got {f.shape}")
    return f


def annihilation(space: FockSpace, f) -> BlockOperator:
    """``a(f) = sum_j conj(f_j) a_j`` (antilinear in ``f``)."""
    f = _check_f(space, f)
    m = sp.csr_matrix((space.dim, space.dim), dtype=complex)
    for j in range(space.d):
        if f[j] != 0:
            m = m + np.conj(f[j]) * space.lowering(j)
    return BlockOperator(space, np.sqrt(space.epsilon) * m, -1)


def creation(space: FockSpace, f) -> BlockOperator:
    """``a^*(f) = sum_j f_j a_j^*``."""
    return annihilation(space, f).adjoint()


def field_operator(space: FockSpace, f) -> BlockOperator:
    """``Phi(f) = (a^*(f) + a(f)) / sqrt(2)`` as a sparse operator."""
    a = annihilation(space, f)
    return BlockOperator(space, (a.matrix + a.matrix.conj().T) / np.sqrt(2), None)


def ladder_operators(space: FockSpace, f):
    """Return ``(a(f), a^*(f), Phi(f), Pi(f))``.

    ``Phi`` and ``Pi`` are returned as sparse operators without a definite
    particle-number offset.
    """
    f = _check_f(space, f)
    a = annihilation(space, f)
    return a, a.adjoint(), field_operator(space, f), field_operator(space, 1j * f)


def number_operator(space: FockSpace) -> BlockOperator:
    """``N = dGamma(I)``, equal to ``eps * n`` on block ``n``."""
    return BlockOperator(space, sp.diags(space.epsilon * space.numbers.astype(complex)), 0)


def weyl_operator(space: FockSpace, f) -> DenseOperator:
    """``W(f) = exp(i Phi(f))`` from the truncated Hermitian generator.

    The exponential is computed from an eigendecomposition of the truncated
    field operator and is unitary to rounding.  It coincides with the true
    Weyl operator only on states supported well below ``n_max``.
    """
    f = _check_f(space, f)
    if not np.any(f):
        return DenseOperator(space, np.eye(space.dim, dtype=complex))
    phi = field_operator(space, f).toarray()
    w, v = sla.eigh(phi)
    return DenseOperator(space, (v * np.exp(1j * w)) @ v.conj().T)


def weyl_apply(space: FockSpace, f, psi, tol: float | None = None):
    """Apply ``W(f)`` to a vector (or to the columns of a matrix).

    Parameters
    ----------
    tol : float, optional
        When given, the squared norm that the result carries in the top
        blocks must stay below ``tol``; otherwise a :class:`GuardError` is
        raised.

    Returns
    -------
    FockVector or ndarray
        Same kind as ``psi``.
    """
    f = _check_f(space, f)
    x = _coeffs(psi)
    if np.any(f):
        gen = (1j * field_operator(space, f).matrix).tocsc()
        y = expm_multiply(gen, x)
    else:
        y = np.array(x, dtype=complex, copy=True)
    if tol is not None:
        cols = y if y.ndim == 2 else y[:, None]
        worst = max(top_mass(cols[:, i], space) for i in range(cols.shape[1]))
        if worst > tol:
            raise GuardError(
                f"Weyl guard violated: mass {worst:.3e} reaches the top blocks (n_max={space.n_max})")
    if isinstance(psi, FockVector):
        return FockVector(space, y)
    return y


def second_quantization(space: FockSpace, A) -> BlockOperator:
    """``dGamma(A) = sum_ij A_ij a_i^* a_j`` for Hermitian ``A``."""
    A = np.asarray(A, dtype=complex).reshape(space.d, space.d)
    if not np.allclose(A, A.conj().T, atol=1e-12):
        raise ValueError("dGamma requires a Hermitian matrix")
    m = sp.csr_matrix((space.dim, space.dim), dtype=complex)
    for i in range(space.d):
        for j in range(space.d):
            if A[i, j] != 0:
                m = m + A[i, j] * (space.lowering(i).T @ space.lowering(j))
    return BlockOperator(space, space.epsilon * m, 0)


def gamma_operator(space: FockSpace, S) -> BlockOperator:
    """``Gamma(S)``: ``S^{(x)n}`` compressed to each symmetric block.

    Columns are built recursively from
    ``Gamma(S) b_j^* = (sum_i S_ij b_i^*) Gamma(S)``.
    """
    S = np.asarray(S, dtype=complex).reshape(space.d, space.d)
    blocks = [np.ones((1, 1), dtype=complex)]
    raised = [space.lowering(i).T.tocsr() for i in range(space.d)]
    for n in range(1, space.n_max + 1):
        sl_prev, sl = space.block(n - 1), space.block(n)
        alphas = space.basis[sl]
        first = np.argmax(alphas > 0, axis=1)
        g = np.zeros((alphas.shape[0], alphas.shape[0]), dtype=complex)
        prev = blocks[-1]
        for j in range(space.d):
            cols = np.nonzero(first == j)[0]
            if cols.size == 0:
                continue
            lower = alphas[cols].copy()
            lower[:, j] -= 1
            src = space.index_of(lower) - sl_prev.start
            cj = sp.csr_matrix((sl.stop - sl.start, sl_prev.stop - sl_prev.start), dtype=complex)
            for i in range(space.d):
                if S[i, j] != 0:
                    cj = cj + S[i, j] * raised[i][sl, sl_prev]
            g[:, cols] = (cj @ prev[:, src]) / np.sqrt(alphas[cols, j])
        blocks.append(g)
    return BlockOperator(space, sp.block_diag(blocks, format="csr"), 0)


def gauge_rotation(space: FockSpace, theta: float) -> BlockOperator:
    """``Gamma(e^{i theta})``, the phase ``e^{i n theta}`` on block ``n``."""
    return BlockOperator(space, sp.diags(np.exp(1j * theta * space.numbers)), 0)


def block_expm(space: FockSpace, op: BlockOperator, scale: complex) -> BlockOperator:
    """``exp(scale * op)`` for a number-conserving operator, block by block."""
    if op.offset != 0:
        raise ValueError("block exponential needs a number-conserving operator")
    blocks = [sla.expm(scale * op.block(n)) for n in range(space.n_max + 1)]
    return BlockOperator(space, sp.block_diag(blocks, format="csr"), 0)


# ----------------------------------------------------------------------
# serialization


def _header(space: FockSpace) -> dict:
    return {"d": space.d, "n_max": space.n_max, "epsilon": space.epsilon}


def operator_to_json(op) -> str:
    """Serialize to ``{"d", "n_max", "epsilon", "entries": [[a_out, a_in, re, im], ...]}``."""
    space = op.space
    m = sp.coo_matrix(op.matrix)
    order = np.lexsort((m.col, m.row))
    entries = []
    for r, c, v in zip(m.row[order], m.col[order], m.data[order]):
        if v != 0:
            entries.append([space.basis[r].tolist(), space.basis[c].tolist(),
                            float(v.real), float(v.imag)])
    doc = _header(space)
    doc["entries"] = entries
    if isinstance(op, BlockOperator):
        doc["offset"] = op.offset
    return json.dumps(doc)


def operator_from_json(text: str, space: FockSpace | None = None):
    doc = json.loads(text)
    if space is None:
        space = make_space(doc["d"], doc["n_max"], doc["epsilon"])
    rows, cols, vals = [], [], []
    for a_out, a_in, re, im in doc["entries"]:
        rows.append(a_out)
        cols.append(a_in)
        vals.append(re + 1j * im)
    r = space.index_of(rows) if rows else np.zeros(0, dtype=int)
    c = space.index_of(cols) if cols else np.zeros(0, dtype=int)
    if np.any(r < 0) or np.any(c < 0):
        raise ValueError("entry outside the truncated basis")
    m = sp.csr_matrix((np.array(vals, dtype=complex), (r, c)), shape=(space.dim, space.dim))
    if "offset" in doc:
        return BlockOperator(space, m, doc["offset"])
    return DenseOperator(space, m.toarray())


def vector_to_json(v: FockVector) -> str:
    """Serialize to ``{"d", "n_max", "epsilon", "tail_mass", "entries": [[alpha, re, im], ...]}``."""
    space = v.space
    doc = _header(space)
    doc["tail_mass"] = v.tail_mass
    doc["entries"] = [[space.basis[i].tolist(), float(v.coeffs[i].real), float(v.coeffs[i].imag)]
                      for i in np.nonzero(v.coeffs)[0]]
    return json.dumps(doc)


def vector_from_json(text: str, space: FockSpace | None = None) -> FockVector:
    doc = json.loads(text)
    if space is None:
        space = make_space(doc["d"], doc["n_max"], doc["epsilon"])
    c = np.zeros(space.dim, dtype=complex)
    if doc["entries"]:
        idx = space.index_of([e[0] for e in doc["entries"]])
        if np.any(idx < 0):
            raise ValueError("entry outside the truncated basis")
        c[idx] = [e[1] + 1j * e[2] for e in doc["entries"]]
    return FockVector(space, c, doc.get("tail_mass", 0.0))
