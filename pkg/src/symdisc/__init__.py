"""Optimal unambiguous discrimination of linearly independent symmetric states."""
from .coherent import CoherentFamily, coefficient_moduli, bound_vs_alpha, find_crossings, fock_vectors
from .discrimination import (
    ConditionalProbabilities,
    KrausSet,
    OptimizerConfig,
    Povm,
    brute_force_max,
    build_kraus,
    detection_operator,
    idp_limit,
    optimal_bound,
    optimal_povm,
    povm_from_kraus,
)
from .errors import SymdiscError
from .numerics import RandomStream, hermitian_eig, max_eigenvalue
from .simulate import FAIL, convexity_probe, run_trials, sample_outcome
from .states import (
    ReciprocalSet,
    SymmetricSet,
    coefficient_moduli_from_gram,
    from_coefficients,
    gram,
    reciprocal_set,
    two_state_from_angle,
)

__version__ = "0.1.0"
