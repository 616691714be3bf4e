"""Coherent mismatch of noisy quantum states.

The coherent mismatch ``c = 1 - |<psi_id|psi>|^2`` measures how far the
dominant eigenvector ``psi`` of a noisy density matrix has rotated away from
the ideal state. It sets the floor that purification-based error mitigation
(virtual distillation) converges to.
"""

from .arrowhead import ArrowheadForm, MismatchResult, decompose, mismatch_analytic, mismatch_direct, mismatch_perturbative, secular_eigenvalues
from .backend import NAME as BACKEND
from .bounds import (
    BoundReport,
    CommutatorMetrics,
    bound_ratio,
    bound_report,
    commutator_lower_bound,
    commutator_metrics,
    commutator_norm,
    commutator_upper_bound,
    delta_upper_bound,
    weyl_bounds,
)
from .states import DensityMatrix, EtaDecomposition, PureState, haar_random_pure, mix, optimal_eta, random_density, renyi_entropy

__version__ = "0.1.0"

__all__ = [
    "ArrowheadForm",
    "BACKEND",
    "BoundReport",
    "CommutatorMetrics",
    "DensityMatrix",
    "EtaDecomposition",
    "MismatchResult",
    "PureState",
    "bound_ratio",
    "bound_report",
    "commutator_lower_bound",
    "commutator_metrics",
    "commutator_norm",
    "commutator_upper_bound",
    "decompose",
    "delta_upper_bound",
    "haar_random_pure",
    "mismatch_analytic",
    "mismatch_direct",
    "mismatch_perturbative",
    "mix",
    "optimal_eta",
    "random_density",
    "renyi_entropy",
    "secular_eigenvalues",
    "weyl_bounds",
]
