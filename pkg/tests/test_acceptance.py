"""Acceptance criteria, one test each, at the stated tolerances.

Each test runs the experiment with its default configuration (seed 0) and
checks the reported metrics; independent closed forms are cross-checked
where one exists.  A PASS/FAIL line per criterion is printed at the end of
the session.
"""
import time
from functools import lru_cache

import numpy as np
from scipy.special import zeta
from scipy.stats import poisson

from fockquant.bec import BecParams, bec_char, nu_crit
from fockquant.experiments import EXPERIMENTS, run_experiment
from fockquant.meanfield import ModelSpec, coherent_wick_limit
from fockquant.symbols import PolySymbol


@lru_cache(maxsize=None)
def run(exp_id: str):
    t0 = time.perf_counter()
    res = run_experiment(exp_id, seed=0)
    return res, time.perf_counter() - t0


def decreasing(xs, inversions=0) -> bool:
    return int(np.sum(np.diff(np.asarray(xs, dtype=float)) > 0)) <= inversions


def test_c01_wick_product_exactness(criterion):
    with criterion(1, "Wick product exactness") as c:
        d = EXPERIMENTS["algebra-verify"].defaults
        assert (d["n_pairs"], d["max_degree"], d["max_d"], d["n_max"]) == (50, 3, 3, 12)
        res, secs = run("algebra-verify")
        m = res.metrics
        c.note(f"max residual {m['max_product_residual']:.2e}, {secs:.1f}s")
        assert m["max_product_residual"] <= 1e-10
        assert secs <= 60


def test_c02_matrix_element_and_number_bounds(criterion):
    with criterion(2, "matrix-element formula and number bounds") as c:
        m = run("algebra-verify")[0].metrics
        c.note(f"residual {m['max_formula_residual']:.2e}, ratio-1 {m['max_bound_ratio'] - 1:.1e}")
        assert m["max_formula_residual"] <= 1e-10
        assert m["max_bound_ratio"] <= 1 + 1e-12


def test_c03_laguerre_connection(criterion):
    with criterion(3, "Laguerre closed form vs Weyl matrix") as c:
        d = EXPERIMENTS["laguerre-verify"].defaults
        assert d["k_max"] == 12 and d["dims"] == [1, 2] and d["epsilons"] == [0.25, 1.0]
        res, secs = run("laguerre-verify")
        r = res.metrics["max_laguerre_residual"]
        c.note(f"max residual {r:.2e}, {secs:.1f}s")
        assert r <= 1e-8
        assert secs <= 60


def test_c04_product_state_limits(criterion):
    with criterion(4, "product-state moment limits") as c:
        d = EXPERIMENTS["prodcoh-limits"].defaults
        assert d["eps_grid"] == [1 / 16, 1 / 32, 1 / 64, 1 / 128, 1 / 256] and d["dims"] == [1, 2]
        res, secs = run("prodcoh-limits")
        m = res.metrics
        worst = 0.0
        for dim in (1, 2):
            for q in ("wick", "weyl", "antiwick"):
                r = m[f"d{dim}_{q}_final_residual"]
                worst = max(worst, r)
                assert r <= 0.05, (dim, q)
                assert m[f"d{dim}_{q}_inversions"] <= 1, (dim, q)
        c.note(f"worst final residual {worst:.2e}, {secs:.1f}s")
        assert secs <= 300


def test_c05_hepp_rate(criterion):
    with criterion(5, "Hepp approximation rate") as c:
        d = EXPERIMENTS["hepp-sweep"].defaults
        assert d["eps_grid"] == [1 / 4, 1 / 8, 1 / 16, 1 / 32] and d["n_max_factor"] == 8.0
        assert d["t"] == 0.5 and abs(complex(*d["z0"][0])) == 1.0
        assert 4 * d["t"] * ModelSpec.scalar(d["a"], d["q0"]).V_norm < 1
        res, secs = run("hepp-sweep")
        errs = np.asarray(res.metrics["errors"])
        eps = np.asarray(d["eps_grid"])
        slope = np.polyfit(np.log(eps), np.log(errs), 1)[0]
        c.note(f"slope {slope:.3f}, {secs:.1f}s")
        assert np.isclose(slope, res.metrics["slope"], atol=1e-12)
        assert 0.35 <= slope <= 0.65
        assert secs <= 600


def test_c06_dyson_expansion(criterion):
    with criterion(6, "Dyson expansion: multicommutators and remainder") as c:
        d = EXPERIMENTS["dyson-sweep"].defaults
        assert d["k_grid"] == [20, 40, 80, 160] and d["multi_levels"] == 3
        assert 4 * abs(d["t"]) * ModelSpec.scalar(d["a"], d["q0"]).V_norm < 1
        res, secs = run("dyson-sweep")
        m = res.metrics
        c.note(f"multicommutator {max(m['multicommutator_residuals']):.1e}, "
               f"slope {m['slope']:.3f}, {secs:.1f}s")
        assert max(m["multicommutator_residuals"]) <= 1e-9
        eps = 1 / np.asarray(d["k_grid"], dtype=float)
        slope = np.polyfit(np.log(eps), np.log(m["remainders"]), 1)[0]
        assert slope >= 0.8
        assert secs <= 300


def test_c07_coherent_wick_propagation(criterion):
    with criterion(7, "coherent Wick propagation") as c:
        d = EXPERIMENTS["hepp-sweep"].defaults
        res = run("hepp-sweep")[0]
        r = np.asarray(res.metrics["coherent_wick_residuals"])
        assert d["cw_eps_grid"][0] == 1 / 20 and d["cw_eps_grid"][-1] == 1 / 160
        factor = r[0] / r[-1]
        # d=1 closed form: <U E, a U E> = z0 e^{-ita} exp(mu (e^{-i theta} - 1))
        a, q0, t = d["a"], d["q0"], d["t"]
        z0 = complex(*d["z0"][0])
        zt = z0 * np.exp(-1j * (a + 2 * q0 * abs(z0) ** 2) * t)
        oracle = []
        for eps in d["cw_eps_grid"]:
            mu, theta = abs(z0) ** 2 / eps, 2 * t * q0 * eps
            oracle.append(abs(z0 * np.exp(-1j * t * a) * np.exp(mu * (np.exp(-1j * theta) - 1)) - zt))
        rep = coherent_wick_limit(ModelSpec.scalar(a, q0), np.array([z0]),
                                  PolySymbol.annihilation([1.0]), t, d["cw_eps_grid"])
        c.note(f"factor {factor:.2f}, oracle gap {np.max(np.abs(rep.residuals - oracle)):.1e}")
        np.testing.assert_allclose(r, oracle, rtol=1e-8)
        np.testing.assert_allclose(rep.residuals, oracle, rtol=1e-8)
        assert factor >= 4


def test_c08_wigner_characteristic_functions(criterion):
    with criterion(8, "Wigner characteristic functions") as c:
        wc = run("wigner-char")[0]
        m = wc.metrics
        d = EXPERIMENTS["wigner-char"].defaults
        assert d["eps_grid"][-1] == 1 / 128
        assert m["coherent_phase_error"] <= 1e-9
        # residual against dirac(z) equals 1 - exp(-eps pi^2 |xi|^2) to the same accuracy
        assert m["coherent_modulus_error"] <= 1e-9
        assert m["hermite_residuals"][-1] <= 0.05
        sp = run("superposition")[0]
        ga = run("gauge-average")[0]
        assert max(ga.metrics["sigma_trace_distance"]) <= 1e-8
        c.note(f"hermite {m['hermite_residuals'][-1]:.3f} at eps=1/128, "
               f"sigma {max(ga.metrics['sigma_trace_distance']):.1e}")
        assert wc.passed and sp.passed and ga.passed


def test_c09_weyl_wick_gap(criterion):
    with criterion(9, "Weyl versus Wick gap") as c:
        d = EXPERIMENTS["laguerre-verify"].defaults
        assert d["gap_epsilons"] == [1 / 2, 1 / 4, 1 / 8]
        g = np.asarray(run("laguerre-verify")[0].metrics["gap_over_eps"])
        c.note(f"gap/eps {np.round(g, 3).tolist()}")
        assert np.all(np.isfinite(g)) and g.max() / g.min() <= 2


def test_c10_bec(criterion):
    with criterion(10, "BEC characteristic function") as c:
        d = EXPERIMENTS["bec"].defaults
        assert d["d_phys"] == 3 and d["beta"] == 1.0
        assert d["eps_grid"] == [1e-2, 1e-3, 1e-4, 1e-5]
        assert np.isclose(nu_crit(3, 1.0), zeta(1.5) * (4 * np.pi) ** -1.5, rtol=1e-12)
        res, secs = run("bec")
        m = res.metrics
        assert m["max_constraint_residual"] <= 1e-12
        finals = []
        for nf in d["nu_factors"]:
            for f0 in d["f0"]:
                r = m[f"nu{nf}_f0{f0}_residuals"]
                assert decreasing(r) and np.all(np.diff(r) < 0)
                assert r[-1] <= 0.02
                finals.append(r[-1])
        # independent limit above nu_crit: exp(-pi^2 (nu - nu_c) |f0|^2)
        nc = zeta(1.5) * (4 * np.pi) ** -1.5
        nu, f0 = d["nu_factors"][-1] * nc, d["f0"][0]
        g = bec_char(BecParams(3, 1.0, nu, d["eps_grid"][-1]), {(0, 0, 0): f0})
        direct = abs(g - np.exp(-np.pi ** 2 * (nu - nc) * f0 ** 2))
        assert np.isclose(direct, m[f"nu{d['nu_factors'][-1]}_f0{f0}_residuals"][-1], rtol=1e-6)
        c.note(f"worst final {max(finals):.4f}, constraint {m['max_constraint_residual']:.1e}, "
               f"{secs:.1f}s")
        assert secs <= 60


def test_c11_normal_approximation(criterion):
    with criterion(11, "normal approximation of Poisson sums") as c:
        assert EXPERIMENTS["normal-approx"].defaults["lambdas"] == [25, 100, 400]
        m = run("normal-approx")[0].metrics
        worst = 0.0
        for rule in ("constant", "mean", "indicator"):
            e = m[f"{rule}_errors"]
            worst = max(worst, e[-1])
            assert e[-1] <= 0.05 and decreasing(e)
        c.note(f"worst error at lambda=400 {worst:.1e}")


def test_c12_dimensional_defect(criterion):
    with criterion(12, "dimensional defect") as c:
        d = EXPERIMENTS["defect-dim"].defaults
        assert d["dims"] == [2, 4, 8, 16]
        m = run("defect-dim")[0].metrics
        assert m["max_wick_moment"] <= 1e-12
        # the number mass lost to truncation is sum_{n > n_max} eps n pmf(n) = P(N >= n_max)
        mu = 1 / d["epsilon"]
        tail = d["epsilon"] * mu * poisson.sf(d["n_max"] - 1, mu)
        c.note(f"wick {m['max_wick_moment']:.1e}, number deficit {m['max_number_deficit']:.2e}")
        assert all(abs(n - 1) <= tail + 1e-15 for n in m["number_expectations"])
