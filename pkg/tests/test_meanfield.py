import json

import numpy as np
import pytest
from scipy.linalg import expm

from fockquant.fock import GuardError, gauge_rotation
from fockquant.meanfield import (ModelSpec, Propagator, coherent_wick_limit, dyson_expansion,
                                 dyson_matrix_element, falling_factorial_alphas, hamiltonian,
                                 hartree_flow, hepp_approximation, hepp_error,
                                 matrix_element_prefactor, quadratic_part, simplex_integrals)
from fockquant.experiments import multicommutator_residuals
from fockquant.symbols import PolySymbol


def d2_model(scale=0.05, **kw):
    A = np.array([[1.0, 0.3 - 0.1j], [0.3 + 0.1j, -0.5]])
    Qt = scale * np.array([[1.0, 0.2, 0.1j], [0.2, 0.5, 0.1], [-0.1j, 0.1, 0.8]])
    return ModelSpec(A, Qt, **kw)


def test_scalar_hamiltonian_spectrum():
    a, q0, eps = 1.3, 0.2, 0.1
    model = ModelSpec.scalar(a, q0, epsilon=eps, n_max=20)
    H = hamiltonian(model.space(), model).toarray()
    n = np.arange(21)
    np.testing.assert_allclose(np.diag(H).real, eps * n * a + eps ** 2 * n * (n - 1) * q0, atol=1e-13)
    assert np.allclose(H, np.diag(np.diag(H)))


def test_model_validation_and_json():
    with pytest.raises(ValueError):
        ModelSpec([[1.0, 1.0], [0.0, 1.0]], np.eye(3))
    m = d2_model(epsilon=0.2, n_max=12)
    back = ModelSpec.from_json(m.to_json())
    np.testing.assert_array_equal(back.A, m.A)
    np.testing.assert_array_equal(back.Qtensor, m.Qtensor)
    assert (back.epsilon, back.n_max, back.V_norm) == (m.epsilon, m.n_max, m.V_norm)
    assert np.isclose(m.V_norm, np.linalg.norm(2 * m.Qtensor, 2))
    json.loads(m.to_json())


def test_hamiltonian_hermitian_number_conserving():
    model = d2_model(epsilon=0.25, n_max=6)
    space = model.space()
    H = hamiltonian(space, model).toarray()
    np.testing.assert_allclose(H, H.conj().T, atol=1e-13)
    off = space.numbers[:, None] != space.numbers[None, :]
    assert np.all(H[off] == 0)


def test_propagator_unitary_and_gauge_covariant():
    model = d2_model(epsilon=0.25, n_max=8)
    space = model.space()
    U = Propagator(space, model).operator(0.7).toarray()
    np.testing.assert_allclose(U.conj().T @ U, np.eye(space.dim), atol=1e-12)
    G = gauge_rotation(space, 1.1).toarray()
    np.testing.assert_array_equal(np.abs(U @ G - G @ U) < 1e-13, True)
    H = hamiltonian(space, model).toarray()
    np.testing.assert_allclose(U, expm(-0.7j * H / 0.25), atol=1e-11)


def test_scalar_hartree_closed_form():
    a, q0 = 1.0, 0.2
    z0 = np.array([0.8 - 0.3j])
    traj = hartree_flow(ModelSpec.scalar(a, q0), z0, 0.9, 1e-3)
    r2 = abs(z0[0]) ** 2
    np.testing.assert_allclose(traj.z[-1], z0 * np.exp(-1j * (a + 2 * q0 * r2) * 0.9), atol=1e-12)
    assert np.isclose(traj.omega[-1], q0 * r2 ** 2 * 0.9, atol=1e-12)
    np.testing.assert_allclose(traj.at(0.45), z0 * np.exp(-1j * (a + 2 * q0 * r2) * 0.45), atol=1e-9)


def test_hartree_conservation_and_gradient():
    model = d2_model(scale=0.3)
    z0 = np.array([0.6 + 0.2j, -0.4j])
    traj = hartree_flow(model, z0, 1.0, 1e-3)
    assert traj.norm_drift < 1e-10 and traj.energy_drift < 1e-10
    # the driving term is dQ/dzbar: compare with finite differences
    g = [s(z0) for s in model.gradient_symbols()]
    h = 1e-6
    for j in range(2):
        e = np.zeros(2)
        e[j] = 1
        dx = (model.Q(z0 + h * e) - model.Q(z0 - h * e)) / (2 * h)
        dy = (model.Q(z0 + 1j * h * e) - model.Q(z0 - 1j * h * e)) / (2 * h)
        assert np.isclose(g[j], (dx + 1j * dy) / 2, atol=1e-7)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_hartree_step_guard():
    with pytest.raises(GuardError):
        hartree_flow(d2_model(scale=2.0), np.array([1.0, 1.0j]), 2.0, 0.5)


def test_quadratic_part_explicit():
    q0 = 0.3
    model = ModelSpec.scalar(1.0, q0)
    zt = np.array([0.7 - 0.4j])
    Q2 = quadratic_part(model, zt)
    z = zt[0]
    for w in (0.3 + 0.1j, -0.2 + 0.5j):
        ref = q0 * (np.conj(z) ** 2 * w ** 2 + z ** 2 * np.conj(w) ** 2 + 4 * abs(z) ** 2 * abs(w) ** 2)
        assert np.isclose(Q2(np.array([w])), ref, rtol=1e-12)


def test_scalar_coherent_annihilation_oracle():
    # <U E(z0), a U E(z0)> = z0 e^{-ita} exp(mu (e^{-i theta} - 1)), mu = |z0|^2/eps, theta = 2 t q0 eps
    a, q0, t, eps = 1.0, 0.2, 0.5, 1 / 40
    z0 = np.array([0.9 + 0.2j])
    rep = coherent_wick_limit(ModelSpec.scalar(a, q0), z0, PolySymbol.annihilation([1.0]), t, [eps])
    mu, theta = abs(z0[0]) ** 2 / eps, 2 * t * q0 * eps
    ref = z0[0] * np.exp(-1j * t * a) * np.exp(mu * (np.exp(-1j * theta) - 1))
    assert abs(rep.values[0] - ref) < 1e-12


def test_hepp_exact_without_interaction():
    model = ModelSpec(np.array([[0.5, 0.2], [0.2, -0.1]]), np.zeros((3, 3)), epsilon=0.2, n_max=24)
    space = model.space()
    assert hepp_error(space, model, np.array([0.5, 0.3j]), 0.6) < 1e-9


def test_hepp_rate_smoke():
    errs = []
    for eps in (0.25, 0.125):
        model = ModelSpec.scalar(1.0, 0.2, epsilon=eps, n_max=int(np.ceil(8 / eps)))
        errs.append(hepp_error(model.space(), model, np.array([1.0]), 0.5))
    assert errs[1] < errs[0] and 0.35 < np.log2(errs[0] / errs[1]) < 0.65


def test_hepp_diagnostics():
    model = ModelSpec.scalar(1.0, 0.2, epsilon=0.25, n_max=32)
    psi, diag = hepp_approximation(model.space(), model, np.array([1.0]), 0.5)
    assert abs(psi.norm() - 1) < 1e-6
    assert diag["norm_drift"] < 1e-6 and diag["aux_top_mass"] < 1e-12


def test_hepp_truncation_guard():
    model = ModelSpec.scalar(1.0, 0.2, epsilon=0.1, n_max=8)
    with pytest.raises(GuardError):
        hepp_approximation(model.space(), model, np.array([1.0]), 0.5)


def test_multicommutator_identity():
    assert max(multicommutator_residuals(3, 2, 8, 0.3, 3)) < 1e-9


def test_dyson_full_sum_reproduces_matrix_element():
    eps, k = 0.2, 5
    model = ModelSpec.scalar(1.0, 0.2, epsilon=eps, n_max=k + 2)
    b = PolySymbol.annihilation([1.0])
    z = np.array([0.8 + 0.6j])
    t = 0.4
    exact = dyson_matrix_element(model.space(), model, b, z, k, 1, t)
    ex = dyson_expansion(model, b, z, k, t, ell=k, n_cut=2 * k)
    assert ex["mode"] == "series"
    # limited by the Hartree integrator used inside the expansion
    assert abs(ex["value"] - exact) < 1e-10


def test_dyson_limit_only_outside_regime():
    model = ModelSpec.scalar(1.0, 2.0, epsilon=0.1)
    ex = dyson_expansion(model, PolySymbol.annihilation([1.0]), np.array([1.0]), 10, 0.5)
    assert ex["mode"] == "limit-only" and ex["tail_bound"] == np.inf


def test_simplex_integrals_converged():
    # quadrature over the simplex is converged at the default order
    model = d2_model(epsilon=0.2)
    b = PolySymbol.annihilation([1.0, 0.5])
    z = np.array([0.6, 0.8j])
    I16 = simplex_integrals(model, b, z, 0.3, 2, order=16)
    I8 = simplex_integrals(model, b, z, 0.3, 2, order=8)
    assert np.max(np.abs(I16 - I8)) < 1e-10


def test_matrix_element_prefactor():
    from math import factorial
    k, m, p, q, eps = 9, 1, 2, 1, 0.3
    ref = np.sqrt(factorial(k) * factorial(k - m) * eps ** (p + q)) / factorial(k - p)
    assert np.isclose(matrix_element_prefactor(k, m, p, q, eps), ref, rtol=1e-13)
    assert matrix_element_prefactor(1, 0, 2, 2, 0.3) == 0.0


@pytest.mark.parametrize("p,n,r,kappa", [(1, 1, 0, 0.7), (2, 3, 1, 1.3), (0, 0, 0, 0.4)])
def test_falling_factorial_identity(p, n, r, kappa):
    L = p + n - r
    alphas = falling_factorial_alphas(p, n, r, kappa)
    for eps in (0.01, 0.1, 0.37):
        direct = np.prod([kappa - i * eps for i in range(L)])
        assert np.isclose(np.polyval(alphas[::-1], eps), direct, rtol=1e-12)


def test_product_state_matrix_element_at_time_zero():
    eps, k = 0.1, 10
    model = ModelSpec.scalar(1.0, 0.2, epsilon=eps, n_max=k + 2)
    b = PolySymbol.annihilation([1.0])
    z = np.array([1.0])
    val = dyson_matrix_element(model.space(), model, b, z, k, 1, 0.0)
    assert np.isclose(val, matrix_element_prefactor(k, 1, 1, 0, eps) * b(z))
