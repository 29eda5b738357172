"""Truncated bosonic Fock spaces, Wick/Weyl/Anti-Wick quantization and
mean-field (classical) limits checked numerically at desk scale."""
from .fock import (BlockOperator, DenseOperator, FockSpace, FockVector, GuardError,
                   TruncationError, annihilation, coherent_state, creation, field_operator,
                   gauge_rotation, hermite_state, make_space, number_operator, poisson_cutoff,
                   second_quantization, vacuum, weyl_apply, weyl_operator)
from .symbols import (GradedSymbol, PolySymbol, poisson_bracket, substitute, wick_commutator,
                      wick_product, wick_quantize)
from .quantizations import (TrigSymbol, anti_wick_quantize_trig, fourier_wigner, laguerre_vw,
                            weyl_quantize_poly, weyl_quantize_trig, weyl_wick_gap)
from .meanfield import (ModelSpec, Propagator, dyson_expansion, dyson_hierarchy, hamiltonian,
                        hartree_flow, hepp_approximation, hepp_error)
from .wigner import (LimitChar, MixedState, char_function, compare_limit, gauge_average,
                     normal_approx, sigma_poisson, sigma_theta, trace_norm_distance)
from .bec import BecParams, bec_char, bec_limit_char, nu_crit, solve_fugacity
from .experiments import EXPERIMENTS, ExperimentResult, run_experiment

__version__ = "0.1.0"

__all__ = [
    "BlockOperator", "DenseOperator", "FockSpace", "FockVector", "GuardError", "TruncationError",
    "annihilation", "coherent_state", "creation", "field_operator", "gauge_rotation",
    "hermite_state", "make_space", "number_operator", "poisson_cutoff", "second_quantization",
    "vacuum", "weyl_apply", "weyl_operator", "GradedSymbol", "PolySymbol", "poisson_bracket",
    "substitute", "wick_commutator", "wick_product", "wick_quantize", "TrigSymbol",
    "anti_wick_quantize_trig", "fourier_wigner", "laguerre_vw", "weyl_quantize_poly",
    "weyl_quantize_trig", "weyl_wick_gap", "ModelSpec", "Propagator", "dyson_expansion",
    "dyson_hierarchy", "hamiltonian", "hartree_flow", "hepp_approximation", "hepp_error",
    "LimitChar", "MixedState", "char_function", "compare_limit", "gauge_average", "normal_approx",
    "sigma_poisson", "sigma_theta", "trace_norm_distance", "BecParams", "bec_char",
    "bec_limit_char", "nu_crit", "solve_fugacity", "EXPERIMENTS", "ExperimentResult",
    "run_experiment",
]
