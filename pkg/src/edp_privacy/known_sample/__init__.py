"""Known-sample (PCA) attack, its two-sample test and the success diagnostics."""

from .diagnostics import invariance_gaussian, min_eigen_ratio, sym_kl_gaussian
from .energy import EnergyTestResult, energy_statistic, energy_two_sample_p, energy_two_sample_test
from .pca import (
    PcaAttackResult,
    PcaDiagnostics,
    SignSearchResult,
    all_sign_vectors,
    estimate_rotation,
    pca_attack_general,
    pca_attack_orthogonal,
    sign_search,
)

__all__ = [
    "EnergyTestResult",
    "PcaAttackResult",
    "PcaDiagnostics",
    "SignSearchResult",
    "all_sign_vectors",
    "energy_statistic",
    "energy_two_sample_p",
    "energy_two_sample_test",
    "estimate_rotation",
    "invariance_gaussian",
    "min_eigen_ratio",
    "pca_attack_general",
    "pca_attack_orthogonal",
    "sign_search",
    "sym_kl_gaussian",
]
