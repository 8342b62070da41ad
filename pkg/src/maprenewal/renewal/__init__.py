"""Renewal sums by Monte Carlo and by Fourier inversion, and their asymptote."""

from .constants import asymptote, check_sigma, constant_Cd, constant_Cd_prime, mahalanobis_sq
from .cubature import BallGrid, Panel, orthonormal_frame, sphere_rule
from .estimate import RenewalEstimate
from .fourier import (
    COMPONENTS,
    DecayTable,
    FourierRenewal,
    FourierSplit,
    I2Row,
    decay_check_J_K,
    default_cutoff,
    fourier_split,
    i2_asymptotic_check,
    lambda_inequality_radius,
    lattice_scan,
    renewal_sum_fourier,
    resolvent_characteristic_sum,
)
from .mc import Ball, gaussian_tail_sum, iid_gaussian_ball_sum, renewal_sum_mc, renewal_sums_mc
from .records import convergence_csv, convergence_rows, dumps_records, estimate_record
from .testfunc import CutoffFunction, TestFunctionH, evaluate_h

__all__ = [
    "asymptote", "check_sigma", "constant_Cd", "constant_Cd_prime", "mahalanobis_sq",
    "BallGrid", "Panel", "orthonormal_frame", "sphere_rule", "RenewalEstimate", "COMPONENTS",
    "DecayTable", "FourierRenewal", "FourierSplit", "I2Row", "decay_check_J_K",
    "default_cutoff", "fourier_split", "i2_asymptotic_check", "lambda_inequality_radius",
    "lattice_scan", "renewal_sum_fourier", "resolvent_characteristic_sum", "Ball",
    "gaussian_tail_sum", "iid_gaussian_ball_sum", "renewal_sum_mc", "renewal_sums_mc",
    "convergence_csv", "convergence_rows", "dumps_records", "estimate_record",
    "CutoffFunction", "TestFunctionH", "evaluate_h",
]
