"""Numerical nonlattice diagnostic.

A model is nonlattice when ``Q(t)`` has spectral radius strictly below one
for every ``t != 0``.  That cannot be decided on a computer, so we sample
``t`` on a grid bounded away from the origin and report the worst radius.
The report keeps the grid and the margin so the caller can judge borderline
cases (for example a lattice only up to a coboundary).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..config import DEFAULT_TOLERANCES
from .process import MarkovAdditiveProcess


@dataclass(frozen=True)
class NonlatticeReport:
    max_radius: float
    worst_t: np.ndarray
    radii: np.ndarray
    grid: np.ndarray
    margin: float

    @property
    def lattice_suspect(self) -> bool:
        return self.max_radius >= 1.0 - self.margin

    def to_dict(self) -> dict:
        return {
            "max_radius": float(self.max_radius),
            "worst_t": self.worst_t.tolist(),
            "margin": self.margin,
            "n_grid": int(len(self.grid)),
            "lattice_suspect": self.lattice_suspect,
        }


def shell_grid(d: int, r_min: float, r_max: float, n_radii: int = 8, n_dirs: int = 64,
               seed: int = 0) -> np.ndarray:
    """Points on ``n_radii`` spheres between ``r_min`` and ``r_max``.

    Directions include the coordinate axes plus deterministic random ones.
    """
    gen = np.random.default_rng(seed)
    dirs = gen.standard_normal((n_dirs, d))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    eye = np.eye(d)
    dirs = np.concatenate([eye, -eye, dirs])
    radii = np.linspace(r_min, r_max, n_radii)
    return (radii[:, None, None] * dirs[None]).reshape(-1, d)


def nonlattice_diagnostic(map_: MarkovAdditiveProcess, grid,
                          margin: float = DEFAULT_TOLERANCES.lattice_margin) -> NonlatticeReport:
    from ..spectral import fourier_operator, spectral_radius

    grid = np.atleast_2d(np.asarray(grid, dtype=float))
    if grid.size == 0:
        raise ValueError("grid must be non-empty")
    if grid.shape[1] != map_.d:
        raise ValueError(f"grid points must have dimension {map_.d}")
    if np.min(np.linalg.norm(grid, axis=1)) <= 0.0:
        raise ValueError("grid must exclude t = 0")
    radii = np.array([spectral_radius(fourier_operator(map_, t)) for t in grid])
    k = int(np.argmax(radii))
    return NonlatticeReport(float(radii[k]), grid[k].copy(), radii, grid, margin)
