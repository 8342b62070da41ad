"""Tolerance profile shared by the numerical routines.

Every tolerance that a routine checks against lives here so a single object
can be threaded through an experiment and hashed into its output records.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass


@dataclass(frozen=True)
class ToleranceProfile:
    # model invariants
    row_sum: float = 1e-12
    stationary: float = 1e-10
    centering: float = 1e-12
    lattice_margin: float = 1e-9
    # linear algebra
    power_tol: float = 1e-12
    power_max_iter: int = 100_000
    resolvent_residual: float = 1e-10
    resolvent_max_cond: float = 1e14
    gap_min: float = 1e-6
    # contour machinery
    contour_nodes: int = 128
    contour_alias_eps: float = 1e-13
    projection_residual: float = 1e-6
    rank_rel_tol: float = 1e-6
    # finite differences
    fd_step: float = 1e-3
    richardson: bool = True

    def replace(self, **changes) -> "ToleranceProfile":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


DEFAULT_TOLERANCES = ToleranceProfile()

PROFILES = {
    "default": DEFAULT_TOLERANCES,
    # looser projector checks and fewer nodes, for quick exploratory runs
    "fast": ToleranceProfile(contour_nodes=64, projection_residual=1e-5),
    "strict": ToleranceProfile(contour_nodes=256, projection_residual=1e-8),
}


def get_profile(name_or_profile) -> ToleranceProfile:
    if isinstance(name_or_profile, ToleranceProfile):
        return name_or_profile
    if name_or_profile is None:
        return DEFAULT_TOLERANCES
    try:
        return PROFILES[name_or_profile]
    except KeyError:
        raise ValueError(
            f"unknown tolerance profile {name_or_profile!r}; "
            f"choose from {sorted(PROFILES)}"
        ) from None
