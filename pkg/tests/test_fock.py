from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import poisson

from fockquant.fock import (GuardError, TruncationError, annihilation, block_dimension,
                            coherent_state, creation, field_operator, gamma_operator,
                            gauge_rotation, hermite_state, make_space, number_operator,
                            operator_from_json, operator_to_json, poisson_cutoff,
                            second_quantization, vacuum, vector_from_json, vector_to_json,
                            weyl_apply, weyl_operator, block_expm)

from _oracles import coherent_coeffs, dense_weyl, kron_lowering, kron_projector


def rand_c(rng, d):
    return rng.normal(size=d) + 1j * rng.normal(size=d)


@pytest.mark.parametrize("d,n_max", [(1, 5), (2, 6), (3, 4)])
def test_dimensions(d, n_max):
    space = make_space(d, n_max, 0.3)
    assert [block_dimension(n, d) for n in range(n_max + 1)] == [comb(n + d - 1, d - 1)
                                                                  for n in range(n_max + 1)]
    assert space.dim == comb(n_max + d, d)
    assert np.all(np.diff(space.numbers) >= 0)


def test_dimension_cap():
    with pytest.raises(TruncationError):
        make_space(6, 40, 0.1, max_dim=10_000)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_lowering_matches_tensor_oracle(d):
    space = make_space(d, 5, 0.37)
    P = kron_projector(space)
    ref = kron_lowering(d, 5, 0.37)
    e = np.eye(d)
    for j in range(d):
        np.testing.assert_allclose(annihilation(space, e[j]).toarray(), P @ ref[j] @ P.T,
                                   atol=1e-14)


def test_ccr_on_guarded_blocks():
    rng = np.random.default_rng(1)
    space = make_space(2, 7, 0.2)
    f, g = rand_c(rng, 2), rand_c(rng, 2)
    a, ad = annihilation(space, f).toarray(), creation(space, g).toarray()
    comm = a @ ad - ad @ a
    cols = space.guarded_indices(1)
    expected = 0.2 * np.vdot(f, g) * np.eye(space.dim)
    np.testing.assert_allclose(comm[:, cols], expected[:, cols], atol=1e-12)


def test_annihilation_antilinear():
    rng = np.random.default_rng(2)
    space = make_space(2, 4, 0.5)
    f, c = rand_c(rng, 2), 0.3 - 1.7j
    np.testing.assert_allclose(annihilation(space, c * f).toarray(),
                               np.conj(c) * annihilation(space, f).toarray(), atol=1e-13)


def test_number_operator():
    space = make_space(2, 5, 0.25)
    N = number_operator(space).toarray()
    np.testing.assert_allclose(np.diag(N), 0.25 * space.numbers)
    e = np.eye(2)
    S = sum(creation(space, e[j]).toarray() @ annihilation(space, e[j]).toarray() for j in range(2))
    np.testing.assert_allclose(S, N, atol=1e-13)
    np.testing.assert_allclose(second_quantization(space, np.eye(2)).toarray(), N, atol=1e-13)


def test_coherent_state_matches_product_formula():
    space = make_space(2, 30, 0.2)
    z = np.array([0.4 - 0.2j, 0.1 + 0.5j])
    E = coherent_state(space, z)
    np.testing.assert_allclose(E.coeffs, coherent_coeffs(space, z), atol=1e-14)
    assert abs(E.norm() ** 2 - (1 - poisson.sf(30, np.vdot(z, z).real / 0.2))) < 1e-12


def test_coherent_state_eigenvector():
    space = make_space(1, 60, 0.1)
    z = np.array([0.7 + 0.3j])
    E = coherent_state(space, z, tol=1e-20).coeffs
    f = np.array([0.5 - 1.0j])
    aE = annihilation(space, f).matrix @ E
    np.testing.assert_allclose(aE, np.vdot(f, z) * E, atol=1e-9)


def test_coherent_truncation_guard():
    space = make_space(1, 5, 0.1)
    with pytest.raises(TruncationError):
        coherent_state(space, [1.0])


@given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5), st.integers(0, 8))
@settings(max_examples=40, deadline=None)
def test_hermite_state_norm(x, y, k):
    space = make_space(2, 8, 0.3)
    z = np.array([x + 1j * y, 0.5 - 0.25j])
    assert np.isclose(hermite_state(space, z, k).norm(), np.linalg.norm(z) ** k, rtol=1e-12)


def test_hermite_state_inner_product():
    space = make_space(3, 6, 1.0)
    rng = np.random.default_rng(3)
    u, v = rand_c(rng, 3), rand_c(rng, 3)
    ip = np.vdot(hermite_state(space, u, 5).coeffs, hermite_state(space, v, 5).coeffs)
    assert np.isclose(ip, np.vdot(u, v) ** 5, rtol=1e-12)


def test_weyl_apply_against_dense_expm():
    space = make_space(2, 10, 0.3)
    f = np.array([0.4 + 0.1j, -0.2 + 0.3j])
    psi = vacuum(space).coeffs
    ref = dense_weyl(space, f) @ psi
    np.testing.assert_allclose(weyl_apply(space, f, psi), ref, atol=1e-12)
    np.testing.assert_allclose(weyl_operator(space, f).matrix @ psi, ref, atol=1e-12)


def test_weyl_shifts_coherent_states():
    eps = 0.1
    space = make_space(1, 80, eps)
    z, xi = np.array([0.5 + 0.2j]), np.array([0.3 - 0.4j])
    moved = weyl_apply(space, np.sqrt(2) * np.pi * xi, coherent_state(space, z, tol=1e-20).coeffs)
    target = coherent_state(space, z + 1j * eps * np.pi * xi, tol=1e-20).coeffs
    assert abs(abs(np.vdot(target, moved)) - 1) < 1e-10


def test_weyl_guard():
    space = make_space(1, 10, 0.5)
    with pytest.raises(GuardError):
        weyl_apply(space, [3.0], vacuum(space).coeffs, tol=1e-12)


def test_weyl_columns():
    space = make_space(1, 30, 0.5)
    X = np.eye(space.dim)[:, :3]
    Y = weyl_apply(space, [0.2j], X)
    for i in range(3):
        np.testing.assert_allclose(Y[:, i], weyl_apply(space, [0.2j], X[:, i]), atol=1e-14)


def test_gamma_of_unitary_moves_coherent_states():
    rng = np.random.default_rng(4)
    Q, _ = np.linalg.qr(rand_c(rng, 4).reshape(2, 2))
    space = make_space(2, 40, 0.1)
    z = np.array([0.3, 0.2 - 0.4j])
    G = gamma_operator(space, Q)
    np.testing.assert_allclose(G.matrix @ coherent_state(space, z, tol=1e-14).coeffs,
                               coherent_state(space, Q @ z, tol=1e-14).coeffs, atol=1e-12)
    np.testing.assert_allclose(G.toarray().conj().T @ G.toarray(), np.eye(space.dim), atol=1e-10)


def test_gauge_rotation_is_gamma_of_phase():
    space = make_space(2, 5, 0.3)
    np.testing.assert_allclose(gauge_rotation(space, 0.7).toarray(),
                               gamma_operator(space, np.exp(0.7j) * np.eye(2)).toarray(),
                               atol=1e-13)


def test_free_evolution_is_gamma():
    A = np.array([[1.0, 0.4 - 0.2j], [0.4 + 0.2j, -0.3]])
    space = make_space(2, 6, 0.25)
    U = block_expm(space, second_quantization(space, A), -1j * 0.8 / 0.25)
    from scipy.linalg import expm
    np.testing.assert_allclose(U.toarray(), gamma_operator(space, expm(-0.8j * A)).toarray(),
                               atol=1e-12)


@pytest.mark.parametrize("mu,tol", [(0.5, 1e-10), (10.0, 1e-14), (400.0, 1e-22), (1024.0, 1e-12)])
def test_poisson_cutoff(mu, tol):
    n = poisson_cutoff(mu, tol)
    assert poisson.sf(n, mu) <= tol
    assert n == 0 or poisson.sf(n - 1, mu) > tol


def test_json_roundtrip():
    space = make_space(2, 4, 0.5)
    psi = coherent_state(space, [0.2, 0.1j], tol=1e-3)
    back = vector_from_json(vector_to_json(psi))
    np.testing.assert_array_equal(back.coeffs, psi.coeffs)
    op = field_operator(space, [1.0, 0.5j])
    back_op = operator_from_json(operator_to_json(annihilation(space, [1.0, 0.5j])))
    np.testing.assert_array_equal(back_op.toarray(), annihilation(space, [1.0, 0.5j]).toarray())
    assert back_op.offset == -1
    assert operator_from_json(operator_to_json(op)).toarray().shape == (space.dim, space.dim)
