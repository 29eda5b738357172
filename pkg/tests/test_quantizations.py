import numpy as np
import pytest
from numpy.polynomial.hermite import herm2poly
from scipy.special import eval_genlaguerre, eval_hermite, zeta

from fockquant.fock import GuardError, hermite_state, make_space
from fockquant.quantizations import (TrigSymbol, anti_wick_quadrature, anti_wick_quantize_trig,
                                     fourier_wigner, gaussian_convolution, laguerre_vw,
                                     real_inner, symplectic, trig_expectation,
                                     weyl_hermite_series, weyl_quantize_poly, weyl_quantize_trig,
                                     weyl_wick_gap)
from fockquant.special import (hermite_coefficients, hermite_h, laguerre_l,
                               polylog_gaussian_series)
from fockquant.symbols import PolySymbol, random_symbol, wick_quantize

from _oracles import dense_weyl, kron_field


# -- special functions ----------------------------------------------------


@pytest.mark.parametrize("n", [0, 1, 2, 5, 12])
def test_hermite_against_scipy(n):
    x = np.linspace(-3, 3, 13)
    np.testing.assert_allclose(hermite_h(n, x), eval_hermite(n, x), rtol=1e-12, atol=1e-9)
    np.testing.assert_allclose(hermite_coefficients(n), herm2poly([0] * n + [1]), rtol=0, atol=0)


@pytest.mark.parametrize("k,alpha", [(0, 0), (3, 0), (7, 2), (12, 5)])
def test_laguerre_against_scipy(k, alpha):
    x = np.linspace(0, 10, 11)
    np.testing.assert_allclose(laguerre_l(k, alpha, x), eval_genlaguerre(k, alpha, x),
                               rtol=1e-10, atol=1e-10)


def test_polylog_series():
    val, tail = polylog_gaussian_series(1.5, 1.0, scale=4 * np.pi)
    assert abs(val - zeta(1.5) * (4 * np.pi) ** -1.5) < 1e-12
    assert tail < 1e-12
    k = np.arange(1, 4000)
    direct = np.sum(0.9 ** k * (2.0 * k) ** -1.5)
    val, tail = polylog_gaussian_series(1.5, 0.9, scale=2.0)
    assert abs(val - direct) < 1e-14 and tail < 1e-12


# -- Fourier-Wigner and Laguerre --------------------------------------------


@pytest.mark.parametrize("d,eps", [(1, 0.25), (1, 1.0), (2, 0.25), (2, 1.0)])
def test_laguerre_closed_form_against_dense_weyl(d, eps):
    rng = np.random.default_rng(d)
    z = rng.normal(size=d) + 1j * rng.normal(size=d)
    z /= np.linalg.norm(z)
    xi = 0.4 * (rng.normal(size=d) + 1j * rng.normal(size=d)) / np.sqrt(d)
    K = 6 if d == 2 else 8
    space = make_space(d, K + (22 if d == 2 else 40), eps)
    W = dense_weyl(space, np.sqrt(2) * np.pi * xi)
    for k in range(K + 1):
        wk = W @ hermite_state(space, z, k).coeffs
        for j in range(K + 1):
            ref = np.vdot(hermite_state(space, z, j).coeffs, wk)
            assert abs(laguerre_vw(k, j, z, xi, eps) - ref) < 1e-8


def test_fourier_wigner_of_vacuum():
    eps = 0.5
    space = make_space(1, 40, eps)
    vac = hermite_state(space, [1.0], 0)
    xi = np.array([0.3 - 0.2j])
    expected = np.exp(-eps * np.pi ** 2 * abs(xi[0]) ** 2 / 2)
    assert abs(fourier_wigner(space, vac, vac, xi) - expected) < 1e-12


def test_real_inner_and_symplectic():
    u, v = np.array([1 + 2j, 0.5j]), np.array([0.3 - 1j, 2.0])
    assert np.isclose(real_inner(u, v), np.vdot(u, v).real)
    assert np.isclose(symplectic(u, v), np.vdot(u, v).imag)


# -- trigonometric symbols --------------------------------------------------


def test_trig_symbol_algebra():
    rng = np.random.default_rng(3)
    xi1, xi2 = rng.normal(size=2) + 1j * rng.normal(size=2), rng.normal(size=2) * 1j
    b1, b2 = TrigSymbol.atom(xi1, 0.5 - 1j), TrigSymbol.cosine(xi2, 2.0)
    z, z0 = rng.normal(size=2) + 1j * rng.normal(size=2), np.array([0.2, -0.1j])
    assert np.isclose((b1 * b2)(z), b1(z) * b2(z))
    assert np.isclose((b1 + b2)(z), b1(z) + b2(z))
    assert np.isclose(b1.conj()(z), np.conj(b1(z)))
    assert np.isclose(b1.translated(z0)(z), b1(z + z0))
    assert np.isclose(b1.rotated(0.4)(z), b1(np.exp(0.4j) * z))
    assert np.isclose(b2(z).imag, 0, atol=1e-13)
    back = TrigSymbol.from_json(b1.to_json())
    np.testing.assert_allclose(back.freqs, b1.freqs)
    np.testing.assert_allclose(back.coeffs, b1.coeffs)


def test_trig_quantizations():
    eps = 0.3
    space = make_space(1, 30, eps)
    xi = np.array([0.4 + 0.1j])
    b = TrigSymbol.atom(xi, 1.5)
    Wq = weyl_quantize_trig(space, b).matrix
    np.testing.assert_allclose(Wq, 1.5 * dense_weyl(space, np.sqrt(2) * np.pi * xi), atol=1e-10)
    Aq = anti_wick_quantize_trig(space, b).matrix
    np.testing.assert_allclose(Aq, Wq * np.exp(-eps * np.pi ** 2 * abs(xi[0]) ** 2 / 2), atol=1e-12)
    psi = hermite_state(space, [1.0], 4)
    assert np.isclose(trig_expectation(space, b, psi), np.vdot(psi.coeffs, Wq @ psi.coeffs))
    assert np.isclose(trig_expectation(space, b, psi, anti_wick=True),
                      np.vdot(psi.coeffs, Aq @ psi.coeffs))


def test_anti_wick_quadrature():
    eps = 0.5
    space = make_space(1, 12, eps)
    low = np.nonzero(space.numbers <= 5)[0]
    # anti-Wick of |z|^2 is a a^* = N + eps
    N = anti_wick_quadrature(space, lambda p: np.abs(p[:, 0]) ** 2).matrix
    np.testing.assert_allclose(N[np.ix_(low, low)], np.diag(eps * space.numbers[low] + eps),
                               atol=1e-10)
    b = TrigSymbol.atom([0.3 - 0.2j])
    Q = anti_wick_quadrature(space, b).matrix
    ref = anti_wick_quantize_trig(make_space(1, 60, eps), b).matrix
    np.testing.assert_allclose(Q[np.ix_(low, low)], ref[np.ix_(low, low)], atol=1e-9)


# -- Weyl quantization of polynomials ----------------------------------------


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_weyl_of_field_powers(n):
    # (sqrt2 Re<f, z>)^n has Weyl quantization Phi(f)^n
    eps, d = 0.3, 2
    space = make_space(d, 10, eps)
    f = np.array([0.7 - 0.2j, 0.4j])
    lin = (PolySymbol.annihilation(f) + PolySymbol.creation(f)) * (1 / np.sqrt(2))
    ref = np.linalg.matrix_power(kron_field(space, f), n)
    got = weyl_quantize_poly(space, lin ** n).toarray()
    cols = space.guarded_indices(n)
    np.testing.assert_allclose(got[:, cols], ref[:, cols], atol=1e-11)


def test_gaussian_convolution_of_number():
    b = PolySymbol.number(3)
    assert gaussian_convolution(b, 0.2).allclose(b + PolySymbol.constant(3, 0.6))


def test_weyl_wick_gap_of_number_is_exact():
    for eps in (0.5, 0.25, 0.125):
        space = make_space(2, int(2 / eps) + 2, eps)
        assert np.isclose(weyl_wick_gap(space, PolySymbol.number(2)), eps, rtol=1e-12)


def test_weyl_wick_gap_guard():
    space = make_space(2, 3, 0.25)
    with pytest.raises(GuardError):
        weyl_wick_gap(space, random_symbol(np.random.default_rng(0), 2, 2, 2))


def test_hermite_series_reconstructs_weyl():
    eps = 0.25
    space = make_space(1, 40, eps)
    f = np.array([0.6 + 0.3j])
    W = dense_weyl(space, f)
    H = weyl_hermite_series(space, f, 40).toarray()
    low = np.nonzero(space.numbers <= 6)[0]
    np.testing.assert_allclose(H[np.ix_(low, low)], W[np.ix_(low, low)], atol=1e-9)


def test_wick_and_weyl_agree_on_linear_symbols():
    space = make_space(2, 6, 0.4)
    b = random_symbol(np.random.default_rng(5), 2, 1, 0)
    np.testing.assert_allclose(weyl_quantize_poly(space, b).toarray(),
                               wick_quantize(space, b).toarray(), atol=0)
