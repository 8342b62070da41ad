"""Fourier operators and their contour-integral spectral decomposition."""

from .contour import ContourSpec, choose_kappa, node_count, standard_contours
from .decomposition import (
    ExpansionTerms,
    FieldValues,
    RemainderResult,
    SemigroupCheck,
    SpectralDecomposition,
    decomposition_residual,
    eigenprojection,
    ergodicity_check,
    expansion_identity_check,
    expansion_terms,
    lambda_quotient,
    perturbation_radius,
    remainder_powers,
    spectral_fields,
    verify_semigroup,
)
from .dump import lambda_grid_csv
from .linalg import resolvent_apply, resolvent_stack, spectral_radius, subdominant_modulus
from .moments import (
    CovarianceResult,
    asymptotic_covariance,
    autocovariance_series,
    exact_walk_moments,
    gradient_lambda,
)
from .operator import FourierOperatorMatrix, fourier_operator, fourier_operator_batch

__all__ = [
    "ContourSpec", "choose_kappa", "node_count", "standard_contours", "ExpansionTerms",
    "FieldValues", "RemainderResult", "SemigroupCheck", "SpectralDecomposition",
    "decomposition_residual", "eigenprojection", "ergodicity_check", "expansion_identity_check",
    "expansion_terms", "lambda_quotient", "perturbation_radius", "remainder_powers",
    "spectral_fields", "verify_semigroup", "lambda_grid_csv", "resolvent_apply",
    "resolvent_stack", "spectral_radius", "subdominant_modulus", "CovarianceResult",
    "asymptotic_covariance", "autocovariance_series", "exact_walk_moments", "gradient_lambda",
    "FourierOperatorMatrix", "fourier_operator", "fourier_operator_batch",
]
