"""Distance-preserving data perturbation and two attacks against it.

Records are columns: a data matrix is ``n x m`` with ``n`` attributes.
"""

from .errors import (
    BudgetError,
    CsvFormatError,
    EDPError,
    InfeasibleAttackError,
    InputError,
    InsufficientDataError,
)
from .linalg import (
    EigenGapWarning,
    EigenModel,
    OrthonormalBasisPair,
    eigen_sorted,
    haar_orthogonal,
    orthonormal_basis,
    sample_covariance,
)
from .metrics import BreachOutcome, breach_columns, cos_breach, eps_breach, evaluate_breach, med_breach
from .perturbation import RecordPermutation, RigidMotion, generate_rigid_motion, perturb, unperturb

__version__ = "0.1.0"

__all__ = [
    "BreachOutcome",
    "BudgetError",
    "CsvFormatError",
    "EDPError",
    "EigenGapWarning",
    "EigenModel",
    "InfeasibleAttackError",
    "InputError",
    "InsufficientDataError",
    "OrthonormalBasisPair",
    "RecordPermutation",
    "RigidMotion",
    "breach_columns",
    "cos_breach",
    "eigen_sorted",
    "eps_breach",
    "evaluate_breach",
    "generate_rigid_motion",
    "haar_orthogonal",
    "med_breach",
    "orthonormal_basis",
    "perturb",
    "sample_covariance",
    "unperturb",
]
