"""Numerical checks of the Riesz pairing and the approximate-identity limit."""

from .checks import (
    IdentityRow,
    IdentityTable,
    approximate_identity_check,
    kernel_convolution,
    random_directions,
    riesz_constant,
    riesz_identity_check,
)
from .functions import BumpProduct, GaussianFunction, SchwartzTestFunction, sphere_area

__all__ = [
    "IdentityRow", "IdentityTable", "approximate_identity_check", "kernel_convolution",
    "random_directions", "riesz_constant", "riesz_identity_check", "BumpProduct",
    "GaussianFunction", "SchwartzTestFunction", "sphere_area",
]
