"""The smooth test function ``h`` and the spectral cutoff ``chi``.

``h`` is defined through its Fourier transform
``hat h(t) = (1 - |t|^2 / b^2)^p`` on ``|t| <= b`` (zero outside), with the
convention ``hat h(t) = int h(x) e^{-i<t,x>} dx``.  It is radial, so
``h(x)`` reduces to a one-dimensional Hankel-type integral that is tabulated
once and interpolated with a cubic spline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import expit, gamma, gammaln, jv

from ..errors import OutOfTableRange

# |J_nu(x)| <= LANDAU * x^{-1/3} for every nu >= 0 and x > 0
LANDAU = 0.7858679


def jinc(nu: float, x) -> np.ndarray:
    """``x^{-nu} J_nu(x)``, continuous at ``x = 0``."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = np.abs(x) < 1e-4
    c0 = 1.0 / (2.0**nu * gamma(nu + 1.0))
    xs = x[small]
    out[small] = c0 * (1.0 - xs**2 / (4.0 * (nu + 1.0)))
    xl = x[~small]
    out[~small] = jv(nu, xl) / xl**nu
    return out


@dataclass(frozen=True)
class TestFunctionH:
    """``h`` with ``hat h = (1 - |t|^2/b^2)^p``; ``hat h`` is ``C^{p-1}``.

    Parameters
    ----------
    d : int
        Dimension.
    b : float
        Radius of the support of ``hat h``.
    p : int
        Exponent, at least ``d - 1``.
    extent : float
        The table covers ``b |x| <= extent``.  Beyond it ``h`` is not
        interpolated; :meth:`envelope` bounds it there.
    spacing : float
        Table step in units of ``1/b``.
    """

    __test__ = False  # not a pytest class

    d: int = 3
    b: float = 2.0
    p: int = 6
    extent: float = 80.0
    spacing: float = 0.02

    def __post_init__(self):
        if self.d < 3:
            raise ValueError("dimension must be >= 3")
        if int(self.p) != self.p or self.p < self.d - 1:
            raise ValueError(f"p must be an integer >= d - 1 = {self.d - 1}")
        if self.b <= 0:
            raise ValueError("b must be positive")

    @property
    def hat0(self) -> float:
        return 1.0

    @property
    def integral(self) -> float:
        """``int h dx = hat h(0)``."""
        return 1.0

    @property
    def radius(self) -> float:
        """Largest ``|x|`` covered by the table."""
        return self.extent / self.b

    def hat_radial(self, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=float)
        return np.where(rho < self.b, np.clip(1.0 - (rho / self.b) ** 2, 0.0, None) ** self.p, 0.0)

    def hat(self, t) -> np.ndarray:
        return self.hat_radial(np.linalg.norm(np.asarray(t, dtype=float), axis=-1))

    def radial_quadrature(self, r, n_nodes: int | None = None) -> np.ndarray:
        """``h(r)`` by Gauss-Legendre quadrature of the radial integral.

        ``h(r) = (2 pi)^{-d/2} b^d int_0^1 (1-s^2)^p s^{d-1} jinc_{d/2-1}(b r s) ds``.
        """
        r = np.atleast_1d(np.asarray(r, dtype=float))
        nu = self.d / 2.0 - 1.0
        if n_nodes is None:
            n_nodes = int(0.75 * self.b * float(np.max(r, initial=0.0))) + 2 * self.p + self.d + 24
        s, w = np.polynomial.legendre.leggauss(n_nodes)
        s = 0.5 * (s + 1.0)
        w = 0.5 * w
        kern = w * (1.0 - s**2) ** self.p * s ** (self.d - 1)
        vals = jinc(nu, self.b * r[:, None] * s[None, :]) @ kern
        return (2.0 * np.pi) ** (-self.d / 2.0) * self.b**self.d * vals

    @cached_property
    def table(self) -> tuple[np.ndarray, np.ndarray, CubicSpline]:
        step = self.spacing / self.b
        grid = np.arange(0.0, self.radius + 0.5 * step, step)
        vals = np.empty_like(grid)
        for lo in range(0, len(grid), 500):
            sl = slice(lo, lo + 500)
            vals[sl] = self.radial_quadrature(grid[sl])
        return grid, vals, CubicSpline(grid, vals, bc_type=((1, 0.0), "not-a-knot"))

    def evaluate_radial(self, r, outside: str = "raise") -> np.ndarray:
        """``h`` at radii ``r``; ``outside`` is ``"raise"`` or ``"zero"`` beyond the table."""
        r = np.asarray(r, dtype=float)
        grid, _, spline = self.table
        beyond = r > grid[-1]
        if np.any(beyond):
            if outside == "raise":
                raise OutOfTableRange(
                    f"|x| = {float(np.max(r)):.6g} beyond table radius {grid[-1]:.6g}; "
                    f"use envelope() to bound h there"
                )
            out = np.zeros_like(r)
            inside = ~beyond
            out[inside] = spline(r[inside])
            return out
        return spline(r)

    def evaluate_sq(self, r2) -> np.ndarray:
        """``h`` from squared radii, zero beyond the table (used by the samplers)."""
        r2 = np.asarray(r2, dtype=float)
        out = np.zeros(r2.shape)
        R = self.table[0][-1]
        mask = r2 < R * R
        if np.any(mask):
            out[mask] = self.table[2](np.sqrt(np.maximum(r2[mask], 0.0)))
        return out

    def envelope(self, R: float) -> float:
        """Bound on ``sup_{|x| >= R} |h(x)|`` from the Bessel closed form.

        ``h(x) = b^d Gamma(p+1) 2^p (2 pi)^{-d/2} (b|x|)^{-(d/2+p)} J_{d/2+p}(b|x|)``
        combined with Landau's bound ``|J_nu(x)| <= 0.7859 x^{-1/3}``.
        """
        z = self.b * R
        logc = (self.d * math.log(self.b) + gammaln(self.p + 1) + self.p * math.log(2.0)
                - 0.5 * self.d * math.log(2.0 * math.pi))
        return float(LANDAU * math.exp(logc - (self.d / 2.0 + self.p + 1.0 / 3.0) * math.log(z)))


def evaluate_h(h: TestFunctionH, x) -> np.ndarray:
    """``h(x)`` for points ``x[..., d]`` by interpolation in ``|x|``."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != h.d:
        raise ValueError(f"x must have last dimension {h.d}")
    return h.evaluate_radial(np.linalg.norm(x, axis=-1))


@dataclass(frozen=True)
class CutoffFunction:
    """Radial ``C^infinity`` step: 1 on ``|t| <= r``, 0 on ``|t| >= alpha``.

    In between ``chi = g(1-x) / (g(1-x) + g(x))`` with ``g(x) = exp(-1/x)`` and
    ``x = (|t| - r) / (alpha - r)``.
    """

    alpha: float
    r: float

    def __post_init__(self):
        if not 0.0 < self.r < self.alpha:
            raise ValueError("cutoff needs 0 < r < alpha")

    def radial(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        x = (s - self.r) / (self.alpha - self.r)
        out = np.where(x <= 0.0, 1.0, 0.0)
        mid = (x > 0.0) & (x < 1.0)
        xm = x[mid]
        out[mid] = expit(1.0 / xm - 1.0 / (1.0 - xm))
        return out

    def __call__(self, t) -> np.ndarray:
        return self.radial(np.linalg.norm(np.asarray(t, dtype=float), axis=-1))
