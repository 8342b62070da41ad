"""Product cubature in spherical coordinates about a chosen polar axis.

``t = rho (u e + sqrt(1 - u^2) omega)`` with ``e`` the polar axis and
``omega`` on the unit sphere of ``e``'s orthogonal complement, so
``dt = rho^{d-1} (1 - u^2)^{(d-3)/2} d rho du d omega``.  The radial factor
is handled by Gauss-Legendre panels, ``u`` by Gauss-Jacobi and ``omega``
recursively, ending with the trapezoid rule on a circle.

The ``rho^{d-1}`` Jacobian removes the ``1/|t|^2`` singularities at the
origin, and with an even circle count the node set is symmetric under
``t -> -t``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import roots_jacobi


def _sphere(k: int, n_u: int, n_phi: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes on ``S^k`` in ``R^{k+1}`` (first coordinate is the polar one)."""
    if k == 1:
        phi = 2.0 * np.pi * (np.arange(n_phi) + 0.5) / n_phi
        return np.stack([np.cos(phi), np.sin(phi)], axis=1), np.full(n_phi, 2.0 * np.pi / n_phi)
    a = (k - 2) / 2.0
    u, wu = roots_jacobi(n_u, a, a)
    sub, wsub = _sphere(k - 1, n_u, n_phi)
    s = np.sqrt(1.0 - u**2)
    pts = np.concatenate(
        [np.repeat(u, len(sub))[:, None], (s[:, None, None] * sub[None]).reshape(-1, k)], axis=1
    )
    return pts, np.outer(wu, wsub).ravel()


def orthonormal_frame(axis) -> np.ndarray:
    """Orthogonal matrix whose first column is ``axis / |axis|``."""
    e = np.asarray(axis, dtype=float)
    e = e / np.linalg.norm(e)
    d = e.size
    M = np.eye(d)
    M[:, 0] = e
    Qm, _ = np.linalg.qr(M)
    if Qm[:, 0] @ e < 0:
        Qm = -Qm
    return Qm


def sphere_rule(d: int, axis, n_u: int, n_phi: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Directions on ``S^{d-1}``, their weights and the polar cosines ``u``."""
    if n_phi % 2:
        raise ValueError("n_phi must be even for the t -> -t symmetry")
    local, w = _sphere(d - 1, n_u, n_phi)
    frame = orthonormal_frame(axis)
    return local @ frame.T, w, local[:, 0]


@dataclass(frozen=True)
class Panel:
    lo: float
    hi: float
    n: int

    def rule(self) -> tuple[np.ndarray, np.ndarray]:
        x, w = np.polynomial.legendre.leggauss(self.n)
        half = 0.5 * (self.hi - self.lo)
        return self.lo + half * (x + 1.0), half * w


@dataclass(frozen=True, eq=False)
class BallGrid:
    """Tensor grid: radial panels times a sphere rule.

    Attributes ``t`` (points), ``w`` (weights with the Jacobian), ``rho`` and
    ``u`` (radius and polar cosine of every point).
    """

    t: np.ndarray
    w: np.ndarray
    rho: np.ndarray
    u: np.ndarray

    @classmethod
    def build(cls, d: int, axis, panels, n_u: int, n_phi: int) -> "BallGrid":
        dirs, wd, u = sphere_rule(d, axis, n_u, n_phi)
        rs, wr = zip(*(p.rule() for p in panels))
        rho = np.concatenate(rs)
        wrho = np.concatenate(wr) * rho ** (d - 1)
        t = (rho[:, None, None] * dirs[None]).reshape(-1, d)
        w = np.outer(wrho, wd).ravel()
        return cls(t, w, np.repeat(rho, len(wd)), np.tile(u, len(rho)))

    def __len__(self):
        return len(self.w)

    def phase(self, norm_a: float) -> np.ndarray:
        """``e^{-i <t, a>}`` for ``a = norm_a * axis``."""
        return np.exp(-1j * norm_a * self.rho * self.u)
