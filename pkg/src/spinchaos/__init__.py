"""Numerical laboratory for molecular chaos in mean-field quantum spin ensembles.

Exact finite-n dynamics of the mean-field (Curie-Weiss) spin model with
O(n) permutation-symmetric marginals, the nonlinear single-particle
mean-field equation with its closed-form solution, canonical-ensemble
free-energy minimization, and chaoticity diagnostics (marginal distances,
convergence-rate fits, measurement pushforwards).
"""

__version__ = "0.1.0"

from .chaos_metrics import (ChaosEntry, ChaosReport, ClassicalSymmetricMeasure,
                            CorollaryReport, LemmaReport, chaos_profile,
                            classical_marginal_tv, corollary_check,
                            lemma_verifier, povm_pushforward)
from .curie_weiss import (CWParams, DENSE_SITE_CAP, KBodyIndex, diagonal_energy,
                          evolve_dense, marginal_dense, marginal_fast,
                          marginal_fast_matrix, spin_z)
from .errors import (CapExceededError, ConvergenceError, DimensionError,
                     HermiticityError, IntegrationError, SpinChaosError,
                     StateValidationError)
from .gibbs import (FreeEnergyReport, GibbsChaosResult, canonical_marginal,
                    canonical_state, free_energy, gibbs_chaos_check,
                    minimize_free_energy)
from .kernels import KERNEL_BACKEND
from .linalg import (hermitian_eig, kron, matrix_exp_hermitian, matrix_log_psd,
                     partial_trace_tail, trace_norm)
from .mean_field import (ConjectureProbeReport, PairPotential, Trajectory,
                         closed_form_cw, conjecture_probe, contract_first,
                         cw_pair_potential, integrate, mean_field_rhs,
                         pair_sum_hamiltonian, swap_operator)
from .states import (BlochVector, QubitState, bloch_from_qubit, product_power,
                     qubit_from_bloch, validate_density)

__all__ = [
    "__version__", "KERNEL_BACKEND",
    "SpinChaosError", "DimensionError", "HermiticityError",
    "StateValidationError", "CapExceededError", "ConvergenceError",
    "IntegrationError",
    "kron", "partial_trace_tail", "hermitian_eig", "matrix_exp_hermitian",
    "matrix_log_psd", "trace_norm",
    "QubitState", "BlochVector", "validate_density", "product_power",
    "qubit_from_bloch", "bloch_from_qubit",
    "CWParams", "KBodyIndex", "DENSE_SITE_CAP", "spin_z", "diagonal_energy",
    "evolve_dense", "marginal_dense", "marginal_fast", "marginal_fast_matrix",
    "PairPotential", "Trajectory", "swap_operator", "contract_first",
    "mean_field_rhs",
    "cw_pair_potential", "closed_form_cw", "integrate",
    "pair_sum_hamiltonian", "conjecture_probe", "ConjectureProbeReport",
    "free_energy", "minimize_free_energy", "canonical_state",
    "canonical_marginal", "gibbs_chaos_check", "FreeEnergyReport",
    "GibbsChaosResult",
    "ChaosEntry", "ChaosReport", "ClassicalSymmetricMeasure",
    "CorollaryReport", "LemmaReport", "chaos_profile", "povm_pushforward",
    "classical_marginal_tv", "corollary_check", "lemma_verifier",
]
