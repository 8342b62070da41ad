"""Markov additive processes: models, simulation and diagnostics."""

from .ar import ContinuousARModel, simulate_ar
from .diagnostics import NonlatticeReport, nonlattice_diagnostic, shell_grid
from .gallery import gallery, gallery_names
from .io import dump_model, load_model, model_from_dict
from .laws import FiniteMixture, Gaussian, IncrementLaw, PointMass, isotropic_gaussian, law_from_dict
from .process import (
    MarkovAdditiveProcess,
    StateSpace,
    TrajectorySample,
    center,
    empirical_transition_counts,
    is_centered,
    is_primitive,
    make_map,
    mean_increment,
    simulate,
    simulate_endpoints,
    stationary_distribution,
    validate_transition_matrix,
)

__all__ = [
    "ContinuousARModel", "simulate_ar", "NonlatticeReport", "nonlattice_diagnostic",
    "shell_grid", "gallery", "gallery_names", "dump_model", "load_model", "model_from_dict",
    "FiniteMixture", "Gaussian", "IncrementLaw", "PointMass", "isotropic_gaussian",
    "law_from_dict", "MarkovAdditiveProcess", "StateSpace", "TrajectorySample", "center",
    "empirical_transition_counts", "is_centered", "is_primitive", "make_map",
    "mean_increment", "simulate", "simulate_endpoints", "stationary_distribution",
    "validate_transition_matrix",
]
