"""Schwartz-class test functions with closed-form Fourier transforms.

Convention: ``hat g(u) = int g(x) e^{-i<u,x>} dx``.

Each family evaluates the two sides of the Riesz pairing
``int hat g(u) |u|^{-2} du`` and ``int g(v) |v|^{-alpha} dv`` by its own
one-dimensional reductions, using only ``hat g`` for the first and only
``g`` for the second.
"""

from __future__ import annotations

import math
from functools import cached_property

import numpy as np
from scipy import integrate
from scipy.special import gamma, gammaln, roots_hermite

from ..renewal.testfunc import jinc


def sphere_area(d: int) -> float:
    """Surface area of the unit sphere in ``R^d``."""
    return 2.0 * math.pi ** (d / 2.0) / gamma(d / 2.0)


def _quad(fun, lo, hi) -> tuple[float, float]:
    val, err = integrate.quad(fun, lo, hi, epsabs=0.0, epsrel=1e-12, limit=400)
    return val, err


class SchwartzTestFunction:
    """Interface shared by the test-function families."""

    d: int

    def __call__(self, x) -> np.ndarray:
        raise NotImplementedError

    def hat(self, u) -> np.ndarray:
        raise NotImplementedError

    @property
    def integral(self) -> float:
        """``int g = hat g(0)``."""
        return float(self.hat(np.zeros(self.d)))

    def support_radius(self, tol: float = 1e-17) -> float:
        """Radius outside which ``|g|`` is below ``tol * max |g|``."""
        raise NotImplementedError

    def width(self) -> float:
        """Smallest length scale of ``g``; sets cubature resolution."""
        raise NotImplementedError

    def riesz_fourier_side(self) -> tuple[float, float]:
        """``(int hat g(u) |u|^{-2} du, error estimate)``."""
        raise NotImplementedError

    def riesz_kernel_side(self, alpha: float) -> tuple[float, float]:
        """``(int g(v) |v|^{-alpha} dv, error estimate)``."""
        raise NotImplementedError


class GaussianFunction(SchwartzTestFunction):
    """``g(x) = exp(-x^T K^{-1} x / 2)`` with ``K = scale^2 cov``.

    With ``normalized=True`` the function is divided by its integral, making
    it a probability density.
    """

    def __init__(self, d: int = 3, scale: float = 1.0, cov=None, normalized: bool = False):
        if d < 1 or scale <= 0:
            raise ValueError("need d >= 1 and scale > 0")
        C = np.eye(d) if cov is None else np.array(cov, dtype=float)
        if C.shape != (d, d) or not np.allclose(C, C.T) or np.linalg.eigvalsh(C).min() <= 0:
            raise ValueError("cov must be a symmetric positive definite d x d matrix")
        self.d = d
        self.scale = float(scale)
        self.K = scale**2 * C
        self.Kinv = np.linalg.inv(self.K)
        self.eig = np.linalg.eigvalsh(self.K)
        self.isotropic = bool(np.allclose(self.eig, self.eig[0], rtol=1e-14, atol=0.0))
        mass = (2.0 * math.pi) ** (d / 2.0) * math.sqrt(float(np.prod(self.eig)))
        self.amplitude = 1.0 / mass if normalized else 1.0
        self.normalized = normalized

    def __repr__(self):
        return f"GaussianFunction(d={self.d}, eig={self.eig.tolist()}, normalized={self.normalized})"

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.amplitude * np.exp(-0.5 * np.einsum("...i,ij,...j->...", x, self.Kinv, x))

    def hat(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        mass = (2.0 * math.pi) ** (self.d / 2.0) * math.sqrt(float(np.prod(self.eig)))
        return self.amplitude * mass * np.exp(-0.5 * np.einsum("...i,ij,...j->...", u, self.K, u))

    def support_radius(self, tol: float = 1e-17) -> float:
        return math.sqrt(2.0 * float(self.eig.max()) * math.log(1.0 / tol))

    def width(self) -> float:
        return math.sqrt(float(self.eig.min()))

    def riesz_fourier_side(self):
        d, hat0 = self.d, self.integral
        if self.isotropic:
            k = self.eig[0]
            val, err = _quad(lambda r: math.exp(-0.5 * k * r * r) * r ** (d - 3), 0.0, math.inf)
            return sphere_area(d) * hat0 * val, sphere_area(d) * hat0 * err
        # |u|^{-2} = int_0^inf e^{-tau |u|^2} d tau; the u-integral is Gaussian
        lam = self.eig
        fun = lambda tau: (2.0 * math.pi) ** (d / 2.0) / math.sqrt(float(np.prod(lam + 2.0 * tau)))
        v1, e1 = _quad(fun, 0.0, 1.0)
        v2, e2 = _quad(fun, 1.0, math.inf)
        return hat0 * (v1 + v2), hat0 * (e1 + e2)

    def riesz_kernel_side(self, alpha: float):
        d, amp = self.d, self.amplitude
        if self.isotropic:
            k = self.eig[0]
            val, err = _quad(lambda r: math.exp(-0.5 * r * r / k) * r ** (d - 1 - alpha), 0.0, math.inf)
            return sphere_area(d) * amp * val, sphere_area(d) * amp * err
        # |v|^{-alpha} = Gamma(alpha/2)^{-1} int_0^inf tau^{alpha/2-1} e^{-tau |v|^2} d tau
        lam = 1.0 / self.eig
        c = amp / gamma(alpha / 2.0)
        fun = lambda tau: (tau ** (alpha / 2.0 - 1.0) * (2.0 * math.pi) ** (d / 2.0)
                           / math.sqrt(float(np.prod(lam + 2.0 * tau))))
        v1, e1 = _quad(fun, 0.0, 1.0)
        v2, e2 = _quad(fun, 1.0, math.inf)
        return c * (v1 + v2), c * (e1 + e2)


class BumpProduct(SchwartzTestFunction):
    """``g(x) = prod_i (1 - (x_i/scale)^2)_+^k``.

    Compactly supported and ``C^{k-1}``, so not literally Schwartz, but its
    transform ``scale^d prod_i G(scale u_i)`` with
    ``G(v) = sqrt(pi) Gamma(k+1) (2/v)^{k+1/2} J_{k+1/2}(v)`` decays like
    ``|v|^{-(k+1)}``, which is all the checks need for ``k >= d``.
    """

    def __init__(self, d: int = 3, k: int = 6, scale: float = 1.0, normalized: bool = False):
        if k < 1 or int(k) != k or scale <= 0:
            raise ValueError("k must be a positive integer and scale positive")
        self.d, self.k, self.scale = d, int(k), float(scale)
        self.g1_integral = math.exp(0.5 * math.log(math.pi) + gammaln(k + 1) - gammaln(k + 1.5))
        mass = (self.scale * self.g1_integral) ** d
        self.amplitude = 1.0 / mass if normalized else 1.0
        self.normalized = normalized

    def __repr__(self):
        return f"BumpProduct(d={self.d}, k={self.k}, scale={self.scale}, normalized={self.normalized})"

    def __call__(self, x) -> np.ndarray:
        y = np.asarray(x, dtype=float) / self.scale
        return self.amplitude * np.prod(np.clip(1.0 - y * y, 0.0, None) ** self.k, axis=-1)

    def hat1(self, v) -> np.ndarray:
        """One-dimensional transform ``G`` of ``(1 - x^2)_+^k``."""
        nu = self.k + 0.5
        c = math.sqrt(math.pi) * math.exp(gammaln(self.k + 1)) * 2.0**nu
        return c * jinc(nu, np.abs(np.asarray(v, dtype=float)))

    def hat(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return self.amplitude * self.scale**self.d * np.prod(self.hat1(self.scale * u), axis=-1)

    def support_radius(self, tol: float = 1e-17) -> float:
        return self.scale * math.sqrt(self.d)

    def width(self) -> float:
        return self.scale / math.sqrt(2.0 * self.k + 3.0)

    @cached_property
    def _panels(self):
        # Gauss-Legendre panels of width pi on [0, V]; |G| < 1e-16 G(0) beyond V
        V = math.pi * math.ceil(10.0 ** (17.0 / (self.k + 1)) / math.pi + 4)
        x, w = np.polynomial.legendre.leggauss(12)
        lo = np.arange(0.0, V, math.pi)
        nodes = (lo[:, None] + 0.5 * math.pi * (x + 1.0)).ravel()
        weights = np.tile(0.5 * math.pi * w, len(lo))
        return nodes, weights * self.hat1(nodes)

    def _gauss_smoothed_hat1(self, tau: float) -> float:
        """``int_R G(v) e^{-tau v^2} dv`` from ``G`` alone."""
        if tau >= 0.5:
            z, w = roots_hermite(80)
            return float(w @ self.hat1(z / math.sqrt(tau))) / math.sqrt(tau)
        nodes, wg = self._panels
        return 2.0 * float(wg @ np.exp(-tau * nodes * nodes))

    def riesz_fourier_side(self):
        d, s = self.d, self.scale
        # |u|^{-2} = int_0^inf e^{-tau |u|^2} d tau; the transform factorises by axis
        fun = lambda tau: self._gauss_smoothed_hat1(tau) ** d
        v1, e1 = _quad(fun, 0.0, 0.5)
        v2, e2 = _quad(fun, 0.5, math.inf)
        c = self.amplitude * s**2
        return c * (v1 + v2), c * (e1 + e2)

    def _duffy(self, alpha: float, n: int) -> float:
        d, k = self.d, self.k
        # degree in t is 2 k d + d - 1 - alpha
        t, wt = np.polynomial.legendre.leggauss(k * d + d + 8)
        t, wt = 0.5 * (t + 1.0), 0.5 * wt
        x, wx = np.polynomial.legendre.leggauss(n)
        x, wx = 0.5 * (x + 1.0), 0.5 * wx
        W = np.stack(np.meshgrid(*([x] * (d - 1)), indexing="ij"), -1).reshape(-1, d - 1)
        Ww = np.prod(np.stack(np.meshgrid(*([wx] * (d - 1)), indexing="ij"), -1).reshape(-1, d - 1), axis=1)
        Ww = Ww * (1.0 + (W * W).sum(axis=1)) ** (-alpha / 2.0)
        total = 0.0
        for tj, wj in zip(t, wt):
            poly = np.prod((1.0 - (tj * W) ** 2) ** k, axis=1)
            total += wj * tj ** (d - 1 - alpha) * (1.0 - tj * tj) ** k * float(poly @ Ww)
        return 2**d * d * total * self.amplitude * self.scale ** (d - alpha)

    def riesz_kernel_side(self, alpha: float, n: int | None = None):
        """Duffy split of the cube into ``d`` pyramids with apex at the origin.

        On the pyramid where ``x_m`` is the largest coordinate, ``x = t (w, 1)``
        with ``t, w_j in [0, 1]``: the Jacobian ``t^{d-1}`` absorbs the
        singularity and the integrand becomes a polynomial in ``t`` times a
        smooth function of ``w``.  The error estimate compares with a rule
        eight nodes coarser in ``w``.
        """
        n = n or (2 * self.k + 24 if self.d <= 4 else self.k + 16)
        fine = self._duffy(alpha, n)
        return fine, abs(fine - self._duffy(alpha, n - 8))
