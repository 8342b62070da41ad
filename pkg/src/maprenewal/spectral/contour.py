"""Circular contours and the trapezoid rule for resolvent integrals."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..config import DEFAULT_TOLERANCES, ToleranceProfile
from ..errors import GapTooSmall
from ..markov_model.process import MarkovAdditiveProcess
from .linalg import subdominant_modulus


@dataclass(frozen=True)
class ContourSpec:
    """Circle ``|z - center| = radius`` sampled at ``nodes`` equispaced points."""

    center: complex
    radius: float
    nodes: int

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("contour radius must be positive")
        if self.nodes < 16:
            raise ValueError("contour needs at least 16 nodes")

    def points(self) -> np.ndarray:
        theta = 2.0 * np.pi * np.arange(self.nodes) / self.nodes
        return self.center + self.radius * np.exp(1j * theta)

    def weights(self) -> np.ndarray:
        """Weights ``w_k`` with ``(1/2 pi i) \\oint F dz ~ sum_k w_k F(z_k)``."""
        return (self.points() - self.center) / self.nodes

    def integrate(self, values: np.ndarray, axis: int = 0) -> np.ndarray:
        """Apply the rule to ``F(z_k)`` stacked along ``axis``."""
        w = self.weights()
        return np.tensordot(w, values, axes=([0], [axis]))


def choose_kappa(map_: MarkovAdditiveProcess, tol: ToleranceProfile = DEFAULT_TOLERANCES) -> float:
    """``kappa = (1 + rho_2) / 2`` with ``rho_2`` the subdominant modulus of ``P``."""
    if "kappa" not in map_._cache:
        rho2 = subdominant_modulus(map_.P, map_.stationary(), tol=tol.power_tol,
                                   max_iter=tol.power_max_iter)
        if 1.0 - rho2 < tol.gap_min:
            raise GapTooSmall(f"spectral gap 1 - rho_2 = {1.0 - rho2:.3g} is below {tol.gap_min}")
        map_._cache["kappa"] = (1.0 + rho2) / 2.0
    return map_._cache["kappa"]


def node_count(kappa: float, tol: ToleranceProfile = DEFAULT_TOLERANCES) -> int:
    """Node count for the inner circle.

    Trapezoid aliasing decays like ``q^M`` where ``q`` is the ratio of the
    contour radius to the nearest outside pole.  Inside the perturbation
    neighbourhood the dominant eigenvalue has modulus at least
    ``(1 + kappa)/2``, so ``q <= 2 kappa / (1 + kappa)``.
    """
    q = 2.0 * kappa / (1.0 + kappa)
    need = math.ceil(math.log(tol.contour_alias_eps) / math.log(q))
    return max(tol.contour_nodes, need)


def standard_contours(kappa: float, tol: ToleranceProfile = DEFAULT_TOLERANCES):
    """Return ``(gamma_1, gamma_0)``.

    ``gamma_1`` circles 1 with radius ``(1 - kappa)/2``; ``gamma_0`` circles 0
    with radius ``kappa``.
    """
    if not 0.0 < kappa < 1.0:
        raise ValueError("kappa must lie in (0, 1)")
    g1 = ContourSpec(1.0 + 0j, (1.0 - kappa) / 2.0, tol.contour_nodes)
    g0 = ContourSpec(0j, kappa, node_count(kappa, tol))
    return g1, g0
