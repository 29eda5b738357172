"""Experiment catalogue behind the command-line runner.

Each experiment takes a validated configuration dictionary and a seed and
returns an :class:`ExperimentResult` holding the verdict, scalar metrics,
guard diagnostics, CSV tables and figure descriptions.  Nothing is written
to disk here; see :mod:`fockquant.report`.
"""
from __future__ import annotations

import copy
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import factorial
from typing import Callable

import numpy as np

from . import bec as _bec
from .fock import GuardError, coherent_state, hermite_state, make_space, weyl_apply
from .meanfield import (ModelSpec, Propagator, coherent_wick_limit, dyson_expansion,
                        dyson_hierarchy, dyson_matrix_element, hartree_flow, hepp_approximation,
                        matrix_element_prefactor)
from .quantizations import TrigSymbol, laguerre_vw, trig_expectation, weyl_wick_gap
from .symbols import (PolySymbol, free_evolved, number_estimate_check, random_symbol,
                      wick_product, wick_quantize)
from .wigner import (CharReport, LimitChar, StateFamily, coherent_cross_term, coherent_family,
                     compare_limit, count_inversions, dimensional_defect, gauge_average,
                     hermite_family, hermite_trace, char_function, normal_approx,
                     positive_type_matrix, rule_constant, rule_indicator, rule_mean,
                     sigma_poisson, sigma_theta, superposition_state, trace_norm_distance)


class ConfigError(ValueError):
    """Invalid experiment configuration."""


SWEEP_COLUMNS = ["epsilon", "k", "t", "observable_id", "exact_re", "exact_im", "approx_re",
                 "approx_im", "abs_err"]
CHAR_COLUMNS = ["epsilon", "probe_id", "g_re", "g_im", "limit_re", "limit_im", "abs_err"]


@dataclass
class Table:
    columns: list
    rows: list = field(default_factory=list)


@dataclass
class Series:
    label: str
    x: list
    y: list


@dataclass
class Figure:
    name: str
    title: str
    xlabel: str
    ylabel: str
    series: list
    logx: bool = True
    logy: bool = True
    hlines: list = field(default_factory=list)


@dataclass
class ExperimentResult:
    experiment: str
    passed: bool
    metrics: dict
    guards: dict
    anchor: str
    tables: dict = field(default_factory=dict)
    figures: list = field(default_factory=list)


@dataclass
class Experiment:
    id: str
    summary: str
    anchor: str
    defaults: dict
    run: Callable


# ----------------------------------------------------------------------
# helpers


def loglog_slope(x, y) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def parallel_map(fn, items, jobs: int = 1) -> list:
    """Order-preserving map, in worker processes when ``jobs > 1``."""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _cplx(pairs) -> np.ndarray:
    """``[[re, im], ...]`` to a complex vector."""
    a = np.asarray(pairs, dtype=float).reshape(-1, 2)
    return a[:, 0] + 1j * a[:, 1]


def _cplx_list(seq) -> np.ndarray:
    return np.array([_cplx(p) for p in seq])


def validate_config(defaults: dict, user: dict | None) -> dict:
    """Merge ``user`` into ``defaults``, rejecting unknown keys and wrong types."""
    cfg = copy.deepcopy(defaults)
    if user is None:
        return cfg
    if not isinstance(user, dict):
        raise ConfigError("configuration must be a JSON object")
    for key, val in user.items():
        if key not in defaults:
            raise ConfigError(f"unknown configuration key {key!r}")
        ref = defaults[key]
        if isinstance(ref, bool):
            ok = isinstance(val, bool)
        elif isinstance(ref, (int, float)):
            ok = isinstance(val, (int, float)) and not isinstance(val, bool)
            if ok and isinstance(ref, int) and not isinstance(ref, bool) and float(val) != int(val):
                ok = False
        elif isinstance(ref, list):
            ok = isinstance(val, list)
        elif isinstance(ref, str):
            ok = isinstance(val, str)
        else:
            ok = True
        if not ok:
            raise ConfigError(f"configuration key {key!r} has the wrong type")
        cfg[key] = type(ref)(val) if isinstance(ref, (int, float)) and not isinstance(ref, bool) else val
    return cfg


def _sweep_row(eps, k, t, obs, exact, approx):
    exact, approx = complex(exact), complex(approx)
    return [eps, k, t, obs, exact.real, exact.imag, approx.real, approx.imag, abs(exact - approx)]


def _char_rows(report: CharReport, label: str):
    return [[eps, f"{label}:{pid}", gr, gi, lr, li, err]
            for eps, pid, gr, gi, lr, li, err in report.rows()]


# ----------------------------------------------------------------------
# algebra-verify


ALGEBRA_DEFAULTS = {"n_pairs": 50, "max_degree": 3, "max_d": 3, "n_max": 12, "epsilon": 0.5,
                    "n_formula": 40, "tol": 1e-10, "bound_tol": 1e-12}


def _random_bidegree(rng, max_degree):
    choices = [(p, q) for p in range(max_degree + 1) for q in range(max_degree + 1)
               if p + q <= max_degree]
    return choices[rng.integers(len(choices))]


def run_algebra_verify(cfg: dict, seed: int, jobs: int = 1) -> ExperimentResult:
    rng = np.random.default_rng(seed)
    eps, n_max = cfg["epsilon"], cfg["n_max"]
    spaces = {}
    prod_rows, formula_rows = [], []
    worst_prod, worst_formula, worst_ratio, worst_below = 0.0, 0.0, 0.0, 0.0
    for i in range(cfg["n_pairs"]):
        d = int(rng.integers(1, cfg["max_d"] + 1))
        space = spaces.setdefault(d, make_space(d, n_max, eps))
        (p1, q1), (p2, q2) = (_random_bidegree(rng, cfg["max_degree"]) for _ in range(2))
        b1, b2 = random_symbol(rng, d, p1, q1), random_symbol(rng, d, p2, q2)
        lhs = (wick_quantize(space, b1).matrix @ wick_quantize(space, b2).matrix)
        rhs = wick_quantize(space, wick_product(b1, b2).collapse(eps)).matrix
        cols = space.guarded_indices(q1 + q2)
        diff = (lhs - rhs)[:, cols]
        res = float(abs(diff).max()) if diff.nnz else 0.0
        worst_prod = max(worst_prod, res)
        prod_rows.append([i, d, p1, q1, p2, q2, res])
        chk = number_estimate_check(space, b1)
        worst_ratio = max(worst_ratio, chk["max_ratio"])
        worst_below = max(worst_below, chk["below_degree_norm"])
    for i in range(cfg["n_formula"]):
        d = int(rng.integers(1, cfg["max_d"] + 1))
        space = spaces.setdefault(d, make_space(d, n_max, eps))
        p, q = _random_bidegree(rng, cfg["max_degree"])
        b = random_symbol(rng, d, p, q)
        z = (rng.normal(size=d) + 1j * rng.normal(size=d)) / np.sqrt(2 * d)
        k = int(rng.integers(0, n_max + 1))
        j = k - p + q if rng.random() < 0.8 else int(rng.integers(0, n_max + 1))
        if not 0 <= j <= n_max:
            j = int(np.clip(j, 0, n_max))
        val = np.vdot(hermite_state(space, z, j).coeffs,
                      wick_quantize(space, b).matrix @ hermite_state(space, z, k).coeffs)
        if k - p >= 0 and j - q == k - p:
            nz = np.linalg.norm(z)
            ref = (np.sqrt(factorial(k) * factorial(j) / (factorial(k - p) * factorial(j - q)))
                   * eps ** ((p + q) / 2) * nz ** (k - p + j - q) * b(z))
        else:
            ref = 0.0
        res = abs(val - ref) / max(1.0, abs(ref))
        worst_formula = max(worst_formula, res)
        formula_rows.append([i, d, p, q, k, j, complex(val).real, complex(val).imag,
                             complex(ref).real, complex(ref).imag, res])
    passed = (worst_prod <= cfg["tol"] and worst_formula <= cfg["tol"]
              and worst_ratio <= 1 + cfg["bound_tol"] and worst_below <= cfg["tol"])
    fig = Figure("residuals", "Symbol-algebra residuals", "instance", "residual",
                 [Series("Wick product", [r[0] for r in prod_rows], [max(r[-1], 1e-18) for r in prod_rows]),
                  Series("matrix-element formula", [r[0] for r in formula_rows],
                         [max(r[-1], 1e-18) for r in formula_rows])],
                 logx=False, hlines=[cfg["tol"]])
    return ExperimentResult(
        "algebra-verify", passed,
        {"max_product_residual": worst_prod, "max_formula_residual": worst_formula,
         "max_bound_ratio": worst_ratio, "max_below_degree_norm": worst_below},
        {"guard_margin": "columns with n <= n_max - (q1 + q2)"},
        "Wick product of symbols, matrix elements on product states, number estimates",
        {"wick_product": Table(["pair", "d", "p1", "q1", "p2", "q2", "residual"], prod_rows),
         "matrix_elements": Table(["instance", "d", "p", "q", "k", "j", "value_re", "value_im",
                                   "formula_re", "formula_im", "residual"], formula_rows)},
        [fig])


# ----------------------------------------------------------------------
# laguerre-verify (also the Weyl/Wick gap)


LAGUERRE_DEFAULTS = {"k_max": 12, "dims": [1, 2], "epsilons": [0.25, 1.0], "n_probes": 3,
                     "probe_radius": 0.5, "margin_d1": 70, "margin_d2": 45, "tol": 1e-8,
                     "gap_epsilons": [0.5, 0.25, 0.125], "gap_energy_cut": 2.0,
                     "gap_variation": 2.0}


def run_laguerre_verify(cfg: dict, seed: int, jobs: int = 1) -> ExperimentResult:
    rng = np.random.default_rng(seed)
    rows, worst = [], 0.0
    K = cfg["k_max"]
    for d in cfg["dims"]:
        z = rng.normal(size=d) + 1j * rng.normal(size=d)
        z /= np.linalg.norm(z)
        probes = rng.normal(size=(cfg["n_probes"], d)) + 1j * rng.normal(size=(cfg["n_probes"], d))
        probes *= cfg["probe_radius"] / np.linalg.norm(probes, axis=1, keepdims=True)
        margin = cfg["margin_d1"] if d == 1 else cfg["margin_d2"]
        for eps in cfg["epsilons"]:
            space = make_space(d, K + margin, eps)
            states = np.stack([hermite_state(space, z, k).coeffs for k in range(K + 1)], axis=1)
            for pi, xi in enumerate(probes):
                W = weyl_apply(space, np.sqrt(2) * np.pi * xi, states, tol=1e-20)
                V = states.conj().T @ W       # V[j, k] = <z^j, W z^k>
                for k in range(K + 1):
                    for j in range(K + 1):
                        ref = laguerre_vw(k, j, z, xi, eps)
                        err = abs(V[j, k] - ref)
                        worst = max(worst, err)
                        rows.append([d, eps, pi, k, j, V[j, k].real, V[j, k].imag,
                                     ref.real, ref.imag, err])
    b = random_symbol(rng, 2, 2, 2)
    b = 0.5 * (b + b.conj())
    gap_rows = []
    for eps in cfg["gap_epsilons"]:
        n_max = int(np.floor(cfg["gap_energy_cut"] / eps + 1e-9)) + 2
        g = weyl_wick_gap(make_space(2, n_max, eps), b, cfg["gap_energy_cut"])
        gap_rows.append([eps, g, g / eps])
    ratios = [r[2] for r in gap_rows]
    variation = max(ratios) / min(ratios)
    passed = worst <= cfg["tol"] and variation <= cfg["gap_variation"]
    figs = [Figure("gap", "Weyl minus Wick on guarded blocks", "epsilon", "gap / epsilon",
                   [Series("gap/eps", [r[0] for r in gap_rows], ratios)], logy=False)]
    return ExperimentResult(
        "laguerre-verify", passed,
        {"max_laguerre_residual": worst, "gap_over_eps": ratios, "gap_variation": variation},
        {"weyl_top_mass_limit": 1e-20, "gap_energy_cut": cfg["gap_energy_cut"]},
        "Laguerre form of Fourier-Wigner transforms of product states; Weyl versus Wick gap",
        {"laguerre": Table(["d", "epsilon", "probe", "k", "j", "weyl_re", "weyl_im",
                            "closed_re", "closed_im", "abs_err"], rows),
         "gap": Table(["epsilon", "gap", "gap_over_eps"], gap_rows)},
        figs)


# ----------------------------------------------------------------------
# prodcoh-limits


PRODCOH_DEFAULTS = {"eps_grid": [1 / 16, 1 / 32, 1 / 64, 1 / 128, 1 / 256], "dims": [1, 2],
                    "z_d1": [[0.9553364891, 0.2955202067]], "z_d2": [[0.6, 0.0], [0.0, 0.8]],
                    "probes_d1": [[[0.5, 0.0]], [[1.0, 0.5]]],
                    "probes_d2": [[[0.5, 0.0], [0.3, 0.0]], [[0.0, 0.4], [-0.6, 0.0]]],
                    "margin": 40, "tol": 0.05}


def _prodcoh_point(args):
    d, eps, z, probes, margin, seed = args
    rng = np.random.default_rng(seed)
    k = int(round(1 / eps))
    space = make_space(d, int(1.15 * k) + margin, eps)
    psi = hermite_state(space, z, k)
    out = []
    for p, q in [(1, 1), (2, 2), (1, 0), (2, 1), (0, 2)]:
        b = random_symbol(rng, d, p, q)
        val = np.vdot(psi.coeffs, wick_quantize(space, b).matrix @ psi.coeffs)
        target = b(z) if p == q else 0.0
        out.append(("wick", f"P{p}{q}", val, target))
    th = 2 * np.pi * np.arange(256) / 256
    ring = np.exp(1j * th)[:, None] * z[None, :]
    for i, xi in enumerate(probes):
        b = TrigSymbol.atom(xi)
        lim = complex(np.mean(b(ring)))
        out.append(("weyl", f"xi{i}", trig_expectation(space, b, psi, tol=1e-20), lim))
        out.append(("antiwick", f"xi{i}", trig_expectation(space, b, psi, anti_wick=True, tol=1e-20),
                    lim))
    return out


def run_prodcoh_limits(cfg: dict, seed: int, jobs: int = 1) -> ExperimentResult:
    tasks = []
    for d in cfg["dims"]:
        z = _cplx(cfg[f"z_d{d}"])
        z = z / np.linalg.norm(z)
        probes = _cplx_list(cfg[f"probes_d{d}"])
        for eps in cfg["eps_grid"]:
            tasks.append((d, eps, z, probes, cfg["margin"], seed))
    results = parallel_map(_prodcoh_point, tasks, jobs)
    rows, resid = [], {}
    for (d, eps, *_), res in zip(tasks, results):
        k = int(round(1 / eps))
        for kind, obs, val, target in res:
            rows.append(_sweep_row(eps, k, 0.0, f"d{d}:{kind}:{obs}", target, val))
            key = (d, kind)
            resid.setdefault(key, {}).setdefault(eps, 0.0)
            resid[key][eps] = max(resid[key][eps], abs(val - target))
    metrics, passed, series = {}, True, []
    for (d, kind), per in resid.items():
        eps_sorted = sorted(per, reverse=True)
        seq = [per[e] for e in eps_sorted]
        inv = count_inversions(seq)
        ok = seq[-1] <= cfg["tol"] and inv <= 1
        passed &= ok
        metrics[f"d{d}_{kind}_final_residual"] = seq[-1]
        metrics[f"d{d}_{kind}_inversions"] = inv
        series.append(Series(f"d={d} {kind}", eps_sorted, [max(s, 1e-18) for s in seq]))
    return ExperimentResult(
        "prodcoh-limits", passed, metrics, {"weyl_top_mass_limit": 1e-20, "margin": cfg["margin"]},
        "Wigner limits of product states: Wick moments and circle-averaged Weyl moments",
        {"moments": Table(SWEEP_COLUMNS, rows)},
        [Figure("residuals", "Product-state moments against their limits", "epsilon",
                "max residual", series, hlines=[cfg["tol"]])])


# ----------------------------------------------------------------------
# hepp-sweep (with coherent Wick propagation)


HEPP_DEFAULTS = {"a": 1.0, "q0": 0.2, "z0": [[1.0, 0.0]], "t": 0.5,
                 "eps_grid": [0.25, 0.125, 0.0625, 0.03125], "n_max_factor": 8.0, "n_steps": 200,
                 "slope_min": 0.35, "slope_max": 0.65,
                 "cw_eps_grid": [1 / 20, 1 / 40, 1 / 80, 1 / 160], "cw_xi": [[1.0, 0.0]],
                 "cw_factor": 4.0}


def _hepp_point(args):
    a, q0, z0, t, eps, n_max, n_steps = args
    model = ModelSpec.scalar(a, q0, epsilon=eps, n_max=n_max)
    space = model.space()
    exact = Propagator(space, model).apply(coherent_state(space, z0, tol=1e-14), t)
    approx, diag = hepp_approximation(space, model, z0, t, n_steps=n_steps)
    return (float(np.linalg.norm(exact.coeffs - approx.coeffs)), complex(np.vdot(approx.coeffs, approx.coeffs)),
            diag["norm_drift"], diag["aux_top_mass"])


def run_hepp_sweep(cfg: dict, seed: int, jobs: int = 1) -> ExperimentResult:
    z0 = _cplx(cfg["z0"])
    V = 2 * abs(cfg["q0"])
    if 4 * abs(cfg["t"]) * V >= 1:
        raise GuardError(f"regime violated: 4 t V_norm = {4 * abs(cfg['t']) * V:.3g} >= 1")
    tasks = [(cfg["a"], cfg["q0"], z0, cfg["t"], eps, int(np.ceil(cfg["n_max_factor"] / eps)),
              cfg["n_steps"]) for eps in cfg["eps_grid"]]
    res = parallel_map(_hepp_point, tasks, jobs)
    errs = [r[0] for r in res]
    slope = loglog_slope(cfg["eps_grid"], errs)
    rows = [_sweep_row(eps, "", cfg["t"], "hepp_state", 1.0, r[1]) for eps, r in zip(cfg["eps_grid"], res)]
    for row, r in zip(rows, res):
        row[-1] = r[0]
    # coherent Wick propagation of <xi, z>
    xi = _cplx(cfg["cw_xi"])
    b = PolySymbol.annihilation(xi)
    model = ModelSpec.scalar(cfg["a"], cfg["q0"])
    rep = coherent_wick_limit(model, z0, b, cfg["t"], cfg["cw_eps_grid"])
    for eps, val in zip(rep.epsilons, rep.values):
        rows.append(_sweep_row(eps, "", cfg["t"], "coherent_wick", val, rep.target))
    factor = float(rep.residuals[0] / rep.residuals[-1])
    ok_slope = cfg["slope_min"] <= slope <= cfg["slope_max"]
    ok_cw = factor >= cfg["cw_factor"] and rep.monotone
    figs = [Figure("hepp_error", "Squeezed coherent approximation error", "epsilon", "error",
                   [Series("|U E - approx|", list(cfg["eps_grid"]), errs),
                    Series("coherent Wick residual", list(rep.epsilons), list(rep.residuals))])]
    return ExperimentResult(
        "hepp-sweep", bool(ok_slope and ok_cw),
        {"errors": errs, "slope": slope, "coherent_wick_residuals": list(rep.residuals),
         "coherent_wick_factor": factor, "coherent_wick_inversions": rep.inversions},
        {"regime_4tV": 4 * abs(cfg["t"]) * V, "norm_drift": max(r[2] for r in res),
         "aux_top_mass": max(r[3] for r in res)},
        "squeezed coherent approximation rate sqrt(eps); coherent Wick observables along the Hartree flow",
        {"sweep": Table(SWEEP_COLUMNS, rows)}, figs)


# ----------------------------------------------------------------------
# dyson-sweep


DYSON_DEFAULTS = {"a": 1.0, "q0": 0.2, "t": 0.5, "z": [[0.9553364891, 0.2955202067]],
                  "k_grid": [20, 40, 80, 160], "slope_min": 0.8, "multi_d": 2, "multi_n_max": 8,
                  "multi_epsilon": 0.3, "multi_levels": 3, "multi_tol": 1e-9}


def multicommutator_residuals(seed: int, d: int, n_max: int, eps: float, levels: int) -> list[float]:
    """``eps^{-n}[Q_{t_n}, ..., [Q_{t_1}, b_t]]`` against ``sum_r eps^r C^(n)_r`` (as matrices)."""
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    A = 0.5 * (X + X.conj().T)
    D = d * (d + 1) // 2
    Y = rng.normal(size=(D, D)) + 1j * rng.normal(size=(D, D))
    model = ModelSpec(A, 0.05 * (Y + Y.conj().T), epsilon=eps, n_max=n_max)
    b = random_symbol(rng, d, 1, 1) + random_symbol(rng, d, 1, 0)
    space = make_space(d, n_max, eps)
    t = 0.4
    times = np.sort(rng.uniform(0, t, size=levels))[::-1]     # t_1 > t_2 > ...
    M = wick_quantize(space, free_evolved(b, A, t)).toarray()
    cols = space.guarded_indices(1)
    out = []
    for n in range(1, levels + 1):
        Qw = wick_quantize(space, free_evolved(model.Q, A, times[n - 1])).toarray()
        M = (Qw @ M - M @ Qw) / eps
        C = dyson_hierarchy(model, b, tuple(times[:n][::-1]) + (t,))
        R = sum(eps ** r * wick_quantize(space, c).toarray() for r, c in enumerate(C))
        out.append(float(np.max(np.abs((M - R)[:, cols]))))
    return out


def _dyson_point(args):
    a, q0, z, t, k = args
    eps = 1.0 / k
    model = ModelSpec.scalar(a, q0, epsilon=eps, n_max=k + 2)
    space = model.space()
    b = PolySymbol.annihilation([1.0])
    me = dyson_matrix_element(space, model, b, z, k, 1, t)
    zt = hartree_flow(model, z, t, 1e-3).z[-1]
    lead = matrix_element_prefactor(k, 1, 1, 0, eps) * b(zt)
    ex = dyson_expansion(model, b, z, k, t, ell=1)
    return me, lead, ex["betas"][0], ex["mode"]


def run_dyson_sweep(cfg: dict, seed: int, jobs: int = 1) -> ExperimentResult:
    z = _cplx(cfg["z"])
    V = 2 * abs(cfg["q0"])
    if 4 * abs(cfg["t"]) * V > 1:
        raise GuardError(f"series regime violated: 4 t V_norm = {4 * abs(cfg['t']) * V:.3g} > 1")
    multi = multicommutator_residuals(seed, cfg["multi_d"], cfg["multi_n_max"],
                                      cfg["multi_epsilon"], cfg["multi_levels"])
    ks = cfg["k_grid"]
    res = parallel_map(_dyson_point, [(cfg["a"], cfg["q0"], z, cfg["t"], k) for k in ks], jobs)
    rows, rem, beta_err = [], [], 0.0
    for k, (me, lead, beta0, mode) in zip(ks, res):
        rows.append(_sweep_row(1.0 / k, k, cfg["t"], "matrix_element", me, lead))
        rem.append(abs(me - lead))
        beta_err = max(beta_err, abs(beta0 - lead))
    eps = [1.0 / k for k in ks]
    slope = loglog_slope(eps, rem)
    passed = max(multi) <= cfg["multi_tol"] and slope >= cfg["slope_min"]
    return ExperimentResult(
        "dyson-sweep", bool(passed),
        {"multicommutator_residuals": multi, "remainders": rem, "slope": slope,
         "beta0_vs_prefactor_b_zt": beta_err},
        {"regime_4tV": 4 * abs(cfg["t"]) * V, "mode": res[0][3]},
        "eps-expansion of evolved Wick observables between product states",
        {"sweep": Table(SWEEP_COLUMNS, rows),
         "multicommutator": Table(["n", "residual"], [[n + 1, r] for n, r in enumerate(multi)])},
        [Figure("remainder", "First-order remainder along eps = 1/k", "epsilon", "remainder",
                [Series("|ME - prefactor b(z_t)|", eps, rem)])])


# ----------------------------------------------------------------------
# wigner-char


WIGNER_DEFAULTS = {"z": [[0.9210609940, 0.3894183423]], "eps_grid": [1 / 16, 1 / 32, 1 / 64, 1 / 128],
                   "probes": [[[0.5, 0.0]], [[1.0, 0.5]], [[0.0, -1.5]], [[2.0, 0.0]]],
                   "phase_tol": 1e-9, "tol": 0.05, "psd_tol": 1e-8, "n_psd_probes": 6,
                   "evolved_eps_grid": [1 / 8, 1 / 16, 1 / 32, 1 / 64], "a": 1.0, "q0": 0.2,
                   "t": 0.5, "hermite_series_eps": 0.125, "hermite_series_terms": 40,
                   "hermite_series_tol": 1e-8}


def run_wigner_char(cfg: dict, seed: int, jobs: int = 1) -> ExperimentResult:
    rng = np.random.default_rng(seed)
    z = _cplx(cfg["z"])
    probes = _cplx_list(cfg["probes"])
    grid = cfg["eps_grid"]
    rows = []
    coh = compare_limit(coherent_family(z), LimitChar.dirac(z), probes, grid, tol=np.inf)
    rows += _char_rows(coh, "coherent")
    expected = np.exp(-np.outer(grid, np.pi ** 2 * np.sum(np.abs(probes) ** 2, axis=1)))
    phase_err = float(np.max(np.abs(np.angle(coh.values * np.conj(coh.limits)[None, :]))))
    modulus_err = float(np.max(np.abs(np.abs(coh.values) - expected)))
    herm = compare_limit(hermite_family(z), LimitChar.circle(z), probes, grid, tol=cfg["tol"])
    rows += _char_rows(herm, "hermite")
    # positive type
    psd_probes = (rng.normal(size=(cfg["n_psd_probes"], z.size))
                  + 1j * rng.normal(size=(cfg["n_psd_probes"], z.size)))
    psd_min = np.inf
    for fam in (coherent_family(z, probe_radius=8.0), hermite_family(z)):
        space, state = fam(grid[0])
        K = positive_type_matrix(space, state, psd_probes)
        psd_min = min(psd_min, float(np.min(np.linalg.eigvalsh(0.5 * (K + K.conj().T)))))
    # Hermite-series reconstruction of Tr[rho W]
    eps_h = cfg["hermite_series_eps"]
    k = int(round(1 / eps_h))
    space = make_space(z.size, k + 40, eps_h)
    psi = hermite_state(space, z, k)
    hs_err = 0.0
    for xi in probes[:2]:
        direct = char_function(space, psi, xi) * np.exp(eps_h * np.pi ** 2 * np.vdot(xi, xi).real / 2)
        hs_err = max(hs_err, abs(hermite_trace(space, psi, xi, cfg["hermite_series_terms"]) - direct))
    # evolved coherent states against the Hartree point
    model = ModelSpec.scalar(cfg["a"], cfg["q0"])
    zt = hartree_flow(model, z, cfg["t"], 1e-3).z[-1]

    def evolved(eps):
        sp_, E = coherent_family(z)(eps)
        m = model.with_epsilon(eps, sp_.n_max)
        return sp_, Propagator(sp_, m).apply(E, cfg["t"])
    evo = compare_limit(StateFamily("evolved-coherent", evolved), LimitChar.dirac(zt),
                        probes[:2], cfg["evolved_eps_grid"], tol=np.inf)
    rows += _char_rows(evo, "evolved")
    passed = (phase_err <= cfg["phase_tol"] and modulus_err <= cfg["phase_tol"] and herm.passed
              and psd_min >= -cfg["psd_tol"] and hs_err <= cfg["hermite_series_tol"]
              and evo.inversions <= 1)
    figs = [Figure("residuals", "Characteristic functions against their limits", "epsilon",
                   "sup residual",
                   [Series("coherent vs dirac", list(grid), list(coh.residuals)),
                    Series("product vs circle", list(grid), list(herm.residuals)),
                    Series("evolved coherent vs dirac(z_t)", list(cfg["evolved_eps_grid"]),
                           list(evo.residuals))], hlines=[cfg["tol"]])]
    return ExperimentResult(
        "wigner-char", bool(passed),
        {"coherent_phase_error": phase_err, "coherent_modulus_error": modulus_err,
         "hermite_residuals": list(herm.residuals), "hermite_inversions": herm.inversions,
         "positive_type_min_eig": psd_min, "hermite_series_error": hs_err,
         "evolved_residuals": list(evo.residuals), "evolved_inversions": evo.inversions},
        {"weyl_top_mass_limit": 1e-20},
        "characteristic functions of coherent, product and evolved coherent states",
        {"char": Table(CHAR_COLUMNS, rows)}, figs)


# ----------------------------------------------------------------------
# superposition


SUPERPOSITION_DEFAULTS = {"z": [[0.9210609940, 0.3894183423]],
                          "eps_grid": [1 / 16, 1 / 32, 1 / 64, 1 / 128],
                          "mixed_eps_grid": [1 / 16, 1 / 64, 1 / 256, 1 / 1024, 1 / 4096],
                          "probes": [[[0.5, 0.0]], [[1.0, 0.5]], [[0.0, -1.0]]],
                          "cross_z2": [[0.7833269096, 0.6216099683]],
                          "pair_a": [[1.0, 0.0], [0.0, 0.0]], "pair_b": [[0.6, 0.0], [0.0, 0.8]],
                          "probes_d2": [[[0.5, 0.0], [0.3, 0.0]], [[0.0, 0.4], [-0.6, 0.0]]],
                          "tol": 0.1, "cross_tol": 1e-9}


def run_superposition(cfg: dict, seed: int, jobs: int = 1) -> ExperimentResult:
    z = _cplx(cfg["z"])
    probes = _cplx_list(cfg["probes"])
    grid = cfg["eps_grid"]
    rows = []

    def mixed(eps):
        space, _ = coherent_family(z)(eps)
        k = int(round(1 / eps))
        # the Weyl guard watches the top tenth of the blocks
        space = make_space(z.size, int(1.15 * max(space.n_max, k)) + 40, eps)
        return space, superposition_state(space, "coherent_product", {"z": z, "k": k}).normalized()
    lim_cp = LimitChar.mixture([0.5, 0.5], [LimitChar.dirac(z), LimitChar.circle(z)])
    cp = compare_limit(StateFamily("coherent+product", mixed), lim_cp, probes, cfg["mixed_eps_grid"],
                       tol=cfg["tol"])
    rows += _char_rows(cp, "coherent_product")

    za, zb = _cplx(cfg["pair_a"]), _cplx(cfg["pair_b"])
    za, zb = za / np.linalg.norm(za), zb / np.linalg.norm(zb)

    def products(eps):
        k = int(round(1 / eps))
        space = make_space(za.size, k + 40, eps)
        return space, superposition_state(space, "products", {"zs": [za, zb], "k": k}).normalized()
    lim_pp = LimitChar.mixture([0.5, 0.5], [LimitChar.circle(za), LimitChar.circle(zb)])
    pp = compare_limit(StateFamily("products", products), lim_pp, _cplx_list(cfg["probes_d2"]), grid,
                       tol=cfg["tol"])
    rows += _char_rows(pp, "products")
    zc = _cplx(cfg["cross_z2"])
    cross_rows, cross_err = [], 0.0
    for eps in grid:
        space, _ = coherent_family(np.abs(z) + np.abs(zc))(eps)
        for xi in probes:
            c = coherent_cross_term(space, z, zc, xi)
            ref = np.exp(-np.sum(np.abs(z - zc - 1j * eps * np.pi * xi) ** 2) / (2 * eps))
            cross_err = max(cross_err, abs(abs(c) - ref))
            cross_rows.append([eps, abs(c), ref])
    cross_decay = [max(r[1] for r in cross_rows if r[0] == e) for e in grid]
    # the E(z) / z^k interference oscillates in eps inside the overlap
    # envelope |<E(z), z^k>| ~ (2 pi / eps)^{-1/4}, so it is checked against
    # that envelope instead of for monotone decay
    envelope = (2 * np.pi / np.asarray(cfg["mixed_eps_grid"])) ** -0.25
    cp_ok = bool(cp.residuals[-1] <= cfg["tol"] and np.all(cp.residuals <= envelope))
    passed = (cp_ok and pp.passed and cross_err <= cfg["cross_tol"]
              and count_inversions(cross_decay) == 0)
    return ExperimentResult(
        "superposition", bool(passed),
        {"coherent_product_residuals": list(cp.residuals),
         "coherent_product_envelope": list(envelope), "products_residuals": list(pp.residuals),
         "cross_term_max": cross_decay, "cross_term_oracle_error": cross_err},
        {"weyl_top_mass_limit": 1e-20},
        "superpositions of asymptotically orthogonal states have mixture limits",
        {"char": Table(CHAR_COLUMNS, rows),
         "cross_terms": Table(["epsilon", "abs_cross", "overlap_oracle"], cross_rows)},
        [Figure("residuals", "Superpositions against mixture limits", "epsilon", "sup residual",
                [Series("(E(z) + z^k)/sqrt2", list(cfg["mixed_eps_grid"]), list(cp.residuals)),
                 Series("(a^k + b^k)/sqrt2, d=2", list(grid), list(pp.residuals)),
                 Series("coherent cross term", list(grid), cross_decay)], hlines=[cfg["tol"]])])


# ----------------------------------------------------------------------
# gauge-average


GAUGE_DEFAULTS = {"z": [[0.9210609940, 0.3894183423]], "z_d2": [[0.6, 0.0], [0.0, 0.8]],
                  "eps_grid": [1 / 16, 1 / 32, 1 / 64, 1 / 128],
                  "probes": [[[0.5, 0.0]], [[1.0, 0.5]]],
                  "probes_d2": [[[0.5, 0.0], [0.3, 0.0]], [[0.0, 0.4], [-0.6, 0.0]]],
                  "sigma_eps": 0.1, "sigma_tol": 1e-8, "t": 0.5, "q_scale": 0.1,
                  "width": 6.0, "tol": 0.1}


def _gaussian_weight(s):
    return np.exp(-np.asarray(s) ** 2 / 2) / np.sqrt(2 * np.pi)


def _d2_model(q_scale: float) -> ModelSpec:
    A = np.array([[1.0, 0.3], [0.3, -0.5]])
    Qt = q_scale * np.array([[1.0, 0.2, 0.0], [0.2, 0.5, 0.1], [0.0, 0.1, 0.8]])
    return ModelSpec(A, Qt)


def run_gauge_average(cfg: dict, seed: int, jobs: int = 1) -> ExperimentResult:
    z = _cplx(cfg["z"])
    z2 = _cplx(cfg["z_d2"])
    z2 = z2 / np.linalg.norm(z2)
    probes, probes2 = _cplx_list(cfg["probes"]), _cplx_list(cfg["probes_d2"])
    grid = cfg["eps_grid"]
    width = cfg["width"]
    # sigma two ways
    sig = []
    eps = cfg["sigma_eps"]
    s1 = make_space(1, int(np.ceil(1 / eps + 12 / np.sqrt(eps))) + 10, eps)
    sig.append(trace_norm_distance(sigma_theta(s1, None, z), sigma_poisson(s1, None, z)))
    model2 = _d2_model(cfg["q_scale"])
    s2 = make_space(2, int(np.ceil(1 / eps + 12 / np.sqrt(eps))) + 10, eps)
    U2 = Propagator(s2, model2.with_epsilon(eps, s2.n_max))
    sig.append(trace_norm_distance(sigma_theta(s2, U2.operator(cfg["t"]), z2),
                                   sigma_poisson(s2, U2.operator(cfg["t"]), z2)))

    def rho_identity(e):
        space = make_space(1, int(1.3 * (1 / e + width / np.sqrt(e))) + 60, e)
        return space, gauge_average(space, None, z, _gaussian_weight, support=width)
    rep1 = compare_limit(StateFamily("gauge-identity", rho_identity), LimitChar.circle(z), probes,
                         grid, tol=cfg["tol"])
    zt = hartree_flow(model2, z2, cfg["t"], 1e-3).z[-1]
    grid2 = grid[:3]

    def rho_meanfield(e):
        space = make_space(2, int(1.15 * (1 / e + width / np.sqrt(e))) + 30, e)
        U = Propagator(space, model2.with_epsilon(e, space.n_max)).operator(cfg["t"])
        return space, gauge_average(space, U, z2, _gaussian_weight, support=width)
    rep2 = compare_limit(StateFamily("gauge-meanfield", rho_meanfield), LimitChar.circle(zt),
                         probes2, grid2, tol=cfg["tol"])
    rows = _char_rows(rep1, "identity") + _char_rows(rep2, "meanfield")
    passed = max(sig) <= cfg["sigma_tol"] and rep1.passed and rep2.passed
    return ExperimentResult(
        "gauge-average", bool(passed),
        {"sigma_trace_distance": sig, "identity_residuals": list(rep1.residuals),
         "meanfield_residuals": list(rep2.residuals)},
        {"weight_support": width, "weyl_top_mass_limit": 1e-20},
        "gauge-averaged coherent states: circle limits at the Hartree point",
        {"char": Table(CHAR_COLUMNS, rows),
         "sigma": Table(["case", "trace_distance"], [["identity", sig[0]], ["meanfield_d2", sig[1]]])},
        [Figure("residuals", "Gauge averages against circle limits", "epsilon", "sup residual",
                [Series("U = I", list(grid), list(rep1.residuals)),
                 Series("U = mean-field, d=2", list(grid2), list(rep2.residuals))],
                hlines=[cfg["tol"]])])


# ----------------------------------------------------------------------
# defect-dim


DEFECT_DEFAULTS = {"dims": [2, 4, 8, 16], "epsilon": 1.0, "n_max": 7, "tol": 1e-12}


def run_defect_dim(cfg: dict, seed: int, jobs: int = 1) -> ExperimentResult:
    recs = dimensional_defect(cfg["dims"], cfg["epsilon"], cfg["n_max"])
    rows = [[r["d"], r["dim"], abs(r["wick_linear"]), abs(r["wick_quadratic"]), r["number"],
             r["tail"]] for r in recs]
    wick = max(max(r[2], r[3]) for r in rows)
    num_err = max(abs(r["number"] - r["number_truncated_exact"]) for r in recs)
    mass_gap = max(abs(r["number"] - 1.0) for r in recs)
    tail_bound = max(r["tail"] * (cfg["n_max"] + 1) + r["tail"] for r in recs)
    passed = wick <= cfg["tol"] and num_err <= 1e-12 and mass_gap <= tail_bound
    return ExperimentResult(
        "defect-dim", bool(passed),
        {"max_wick_moment": wick, "number_expectations": [r["number"] for r in recs],
         "number_vs_truncated_poisson": num_err, "max_number_deficit": mass_gap},
        {"poisson_tail": recs[0]["tail"], "deficit_bound": tail_bound},
        "loss of compactness along the dimension: vanishing Wick moments with unit number",
        {"defect": Table(["d", "dim", "wick_linear", "wick_quadratic", "number", "tail"], rows)},
        [Figure("defect", "Escaping coherent states", "dimension d", "value",
                [Series("|Wick moment| + 1e-18", [r[0] for r in rows], [r[2] + 1e-18 for r in rows]),
                 Series("1 - <N>", [r[0] for r in rows], [max(1 - r[4], 1e-18) for r in rows])])])


# ----------------------------------------------------------------------
# bec


BEC_DEFAULTS = {"d_phys": 3, "beta": 1.0, "nu_factors": [0.5, 2.0], "f0": [0.5, 2.0], "f0_scan": [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 3.0],
                "eps_grid": [1e-2, 1e-3, 1e-4, 1e-5], "tol": 0.02, "constraint_tol": 1e-12}


def run_bec(cfg: dict, seed: int, jobs: int = 1) -> ExperimentResult:
    d, beta = cfg["d_phys"], cfg["beta"]
    nc = _bec.nu_crit(d, beta)
    rows, metrics, passed, series = [], {"nu_crit": nc}, True, []
    worst_constraint, worst_tail = 0.0, 0.0
    zero = (0,) * d
    for fac in cfg["nu_factors"]:
        nu = fac * nc
        res = {i: [] for i in range(len(cfg["f0"]))}
        for eps in cfg["eps_grid"]:
            p = _bec.BecParams(d, beta, nu, eps)
            sol = _bec.solve_fugacity(p)
            worst_constraint = max(worst_constraint, sol.residual)
            worst_tail = max(worst_tail, sol.tail_bound)
            for i, a0 in enumerate(cfg["f0"]):
                f = {zero: a0}
                g = _bec.bec_char(p, f, sol)
                lim = _bec.bec_limit_char(f, beta, nu, d)
                res[i].append(abs(g - lim))
                rows.append([eps, sol.z, sol.residual, f"nu={fac}nc:f0={a0}", g.real, g.imag,
                             lim.real, lim.imag])
        for i, a0 in enumerate(cfg["f0"]):
            seq = res[i]
            ok = count_inversions(seq) == 0 and seq[-1] <= cfg["tol"]
            passed &= ok
            metrics[f"nu{fac}_f0{a0}_residuals"] = seq
            series.append(Series(f"nu={fac} nu_c, f0={a0}", list(cfg["eps_grid"]), seq))
    passed &= worst_constraint <= cfg["constraint_tol"] and worst_tail <= 1e-10
    metrics["max_constraint_residual"] = worst_constraint
    # not part of the verdict: how the smallest-eps residual depends on f_0
    scan = []
    for fac in cfg["nu_factors"]:
        p = _bec.BecParams(d, beta, fac * nc, cfg["eps_grid"][-1])
        sol = _bec.solve_fugacity(p)
        for a0 in cfg["f0_scan"]:
            f = {zero: a0}
            scan.append(abs(_bec.bec_char(p, f, sol) - _bec.bec_limit_char(f, beta, fac * nc, d)))
    metrics["final_residual_sup_over_f0_scan"] = max(scan)
    return ExperimentResult(
        "bec", bool(passed), metrics, {"lattice_tail_bound": worst_tail},
        "ideal Bose gas: characteristic function limits below and above the critical density",
        {"bec": Table(["epsilon", "z_eps", "constraint_residual", "probe_id", "g_re", "g_im",
                       "limit_re", "limit_im"], rows)},
        [Figure("residuals", "Ideal Bose gas characteristic functions", "epsilon",
                "|G_eps - limit|", series, hlines=[cfg["tol"]])])


# ----------------------------------------------------------------------
# normal-approx


NORMAL_DEFAULTS = {"lambdas": [25, 100, 400], "indicator": [-0.5, 1.0], "tol": 0.05}


def run_normal_approx(cfg: dict, seed: int, jobs: int = 1) -> ExperimentResult:
    rules = {"constant": rule_constant, "mean": rule_mean,
             "indicator": rule_indicator(*cfg["indicator"])}
    rows, metrics, passed, series = [], {}, True, []
    for name, rule in rules.items():
        errs = []
        for lam in cfg["lambdas"]:
            lhs, rhs = normal_approx(rule, lam)
            errs.append(abs(lhs - rhs))
            rows.append([name, lam, lhs, rhs, abs(lhs - rhs)])
        ok = errs[-1] <= cfg["tol"] and count_inversions(errs) == 0
        passed &= ok
        metrics[f"{name}_errors"] = errs
        series.append(Series(name, list(cfg["lambdas"]), [max(e, 1e-18) for e in errs]))
    return ExperimentResult(
        "normal-approx", bool(passed), metrics, {"midpoint_step": "min(0.01, 1/(2 sqrt(lambda)))"},
        "normal approximation of Poisson-weighted sums",
        {"normal": Table(["rule", "lambda", "lhs", "rhs", "abs_err"], rows)},
        [Figure("errors", "Poisson sum versus Gaussian integral", "lambda", "|lhs - rhs|", series,
                hlines=[cfg["tol"]])])


# ----------------------------------------------------------------------


EXPERIMENTS = {e.id: e for e in [
    Experiment("algebra-verify", "Wick product, matrix-element formula and number bounds",
               "Wick calculus of polynomial symbols", ALGEBRA_DEFAULTS, run_algebra_verify),
    Experiment("laguerre-verify", "Laguerre closed form of Fourier-Wigner values; Weyl/Wick gap",
               "Laguerre connection and Weyl versus Wick", LAGUERRE_DEFAULTS, run_laguerre_verify),
    Experiment("prodcoh-limits", "Product-state moments converge to their limits",
               "Wigner limits of product states", PRODCOH_DEFAULTS, run_prodcoh_limits),
    Experiment("hepp-sweep", "Squeezed coherent approximation rate and coherent Wick propagation",
               "mean-field propagation of coherent states", HEPP_DEFAULTS, run_hepp_sweep),
    Experiment("dyson-sweep", "Multicommutator identity and first-order remainder",
               "eps-expansion of evolved observables", DYSON_DEFAULTS, run_dyson_sweep),
    Experiment("wigner-char", "Characteristic functions of coherent, product and evolved states",
               "characteristic functions and limits", WIGNER_DEFAULTS, run_wigner_char),
    Experiment("superposition", "Superpositions with mixture limits",
               "asymptotic orthogonality", SUPERPOSITION_DEFAULTS, run_superposition),
    Experiment("gauge-average", "Gauge averages: two constructions and circle limits",
               "gauge-averaged coherent states", GAUGE_DEFAULTS, run_gauge_average),
    Experiment("defect-dim", "Dimensional defect of compactness",
               "escaping coherent states", DEFECT_DEFAULTS, run_defect_dim),
    Experiment("bec", "Ideal Bose gas below and above the critical density",
               "Bose-Einstein condensation", BEC_DEFAULTS, run_bec),
    Experiment("normal-approx", "Normal approximation of Poisson sums",
               "Poisson normal approximation", NORMAL_DEFAULTS, run_normal_approx),
]}


def run_experiment(exp_id: str, config: dict | None = None, seed: int = 0,
                   jobs: int = 1) -> ExperimentResult:
    """Validate ``config`` and run experiment ``exp_id``."""
    if exp_id not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {exp_id!r}")
    exp = EXPERIMENTS[exp_id]
    cfg = validate_config(exp.defaults, config)
    return exp.run(cfg, seed, jobs)


__all__ = ["ConfigError", "Table", "Series", "Figure", "ExperimentResult", "Experiment",
           "EXPERIMENTS", "run_experiment", "validate_config", "loglog_slope", "parallel_map",
           "multicommutator_residuals"]
