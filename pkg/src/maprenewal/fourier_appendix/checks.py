"""Numerical checks of two Fourier-analytic identities behind the renewal asymptote.

* Riesz pairing: ``int hat g(u) |u|^{-2} du = c int g(v) |v|^{2-d} dv`` with
  ``c = (2 pi)^{d/2} 2^{d/2-2} Gamma((d-2)/2)``.
* Approximate identity: ``(F_beta * f)(e) -> int F`` as ``beta -> inf``,
  uniformly over unit vectors ``e``, where ``F_beta(x) = beta^d F(beta x)``
  and ``f(w) = |w|^{2-d}``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .. import rng as rng_mod
from ..errors import DimensionTooSmall, QuadratureBudgetExceeded
from ..renewal.cubature import _sphere, orthonormal_frame
from ..renewal.fourier import _adaptive
from .functions import SchwartzTestFunction


def riesz_constant(d: int) -> float:
    if d < 3:
        raise DimensionTooSmall(f"d = {d}; the Riesz pairing needs d >= 3")
    return math.exp(0.5 * d * math.log(2.0 * math.pi) + (d / 2.0 - 2.0) * math.log(2.0)
                    + gammaln((d - 2) / 2.0))


def riesz_identity_check(g: SchwartzTestFunction, d: int | None = None, rtol: float = 1e-9) -> dict:
    """Both sides of the Riesz pairing and their relative difference.

    Raises
    ------
    QuadratureBudgetExceeded
        If either side's quadrature error estimate exceeds ``rtol``.
    """
    d = g.d if d is None else d
    if d != g.d:
        raise ValueError(f"test function lives in R^{g.d}, not R^{d}")
    c = riesz_constant(d)
    lhs, e_l = g.riesz_fourier_side()
    kern, e_k = g.riesz_kernel_side(d - 2.0)
    rhs = c * kern
    for side, val, err in (("fourier", lhs, e_l), ("kernel", kern, e_k)):
        if err > rtol * abs(val):
            raise QuadratureBudgetExceeded(f"{side} side: error {err:.3g} above rtol * |{val:.6g}|")
    return {"lhs": lhs, "rhs": rhs, "rel_err": abs(lhs - rhs) / abs(lhs), "c": c,
            "lhs_error": e_l, "rhs_error": c * e_k}


def random_directions(d: int, n: int, seed: int = 0) -> np.ndarray:
    z = rng_mod.stream(seed, rng_mod.GRID, d, n).standard_normal((n, d))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def kernel_convolution(F: SchwartzTestFunction, beta: float, directions, level: int = 0) -> np.ndarray:
    """``(F_beta * |.|^{2-d})(e)`` for each unit vector ``e`` in ``directions``.

    Spherical coordinates ``w = r omega`` about the kernel's singularity turn
    the integral into ``int r dr int F_beta(e - r omega) d omega``.  The polar
    axis is ``e``, and ``r`` and the polar angle are restricted to the window
    where ``F_beta(e - w)`` is non-negligible.
    """
    d = F.d
    s = 1.5**level
    R = F.support_radius()
    rho = R / beta
    ratio = R / F.width()
    n_r = int(math.ceil(s * (2.0 * ratio + 24)))
    n_phi = 2 * int(math.ceil(s * (1.5 * ratio + 12)))
    r, wr = np.polynomial.legendre.leggauss(n_r)
    lo, hi = max(0.0, 1.0 - rho), 1.0 + rho
    r = lo + 0.5 * (hi - lo) * (r + 1.0)
    wr = 0.5 * (hi - lo) * wr * r
    th_max = math.asin(rho) if rho < 1.0 else math.pi
    th, wth = np.polynomial.legendre.leggauss(n_r)
    th = 0.5 * th_max * (th + 1.0)
    wth = 0.5 * th_max * wth * np.sin(th) ** (d - 2)
    if d == 3:
        ang = 2.0 * np.pi * (np.arange(n_phi) + 0.5) / n_phi
        eta, weta = np.stack([np.cos(ang), np.sin(ang)], 1), np.full(n_phi, 2.0 * np.pi / n_phi)
    else:
        eta, weta = _sphere(d - 2, n_phi // 2, n_phi)
    out = []
    for e in np.atleast_2d(np.asarray(directions, dtype=float)):
        frame = orthonormal_frame(e)
        e = frame[:, 0]
        perp = eta @ frame[:, 1:].T  # (n_eta, d)
        total = 0.0
        for tj, wj in zip(th, wth):
            omega = math.cos(tj) * e + math.sin(tj) * perp  # (n_eta, d)
            x = e[None, None, :] - r[:, None, None] * omega[None]  # (n_r, n_eta, d)
            vals = F(beta * x)
            total += wj * float(wr @ vals @ weta)
        out.append(beta**d * total)
    return np.array(out)


@dataclass(frozen=True)
class IdentityRow:
    beta: float
    direction_index: int
    value: float
    deviation: float
    error: float


@dataclass(frozen=True)
class IdentityTable:
    rows: tuple
    integral: float

    @property
    def betas(self) -> list[float]:
        return sorted({r.beta for r in self.rows})

    def deviations(self, beta: float) -> np.ndarray:
        return np.array([r.deviation for r in self.rows if r.beta == beta])

    def max_deviation(self, beta: float) -> float:
        return float(np.max(self.deviations(beta)))

    def mean_deviation(self, beta: float) -> float:
        return float(np.mean(self.deviations(beta)))

    def spread(self, beta: float) -> float:
        dev = self.deviations(beta)
        return float(dev.max() - dev.min())

    def strictly_decreasing(self) -> bool:
        m = [self.max_deviation(b) for b in self.betas]
        return all(x > y for x, y in zip(m, m[1:]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["beta", "direction_index", "value", "deviation"])
        for r in self.rows:
            w.writerow([format(r.beta, ".17g"), r.direction_index, format(r.value, ".17g"),
                        format(r.deviation, ".17g")])
        return buf.getvalue()


def approximate_identity_check(F: SchwartzTestFunction, d: int | None = None, betas=(4, 8, 16, 32, 64),
                               directions=None, rtol: float = 1e-10, max_level: int = 3) -> IdentityTable:
    """Relative deviation ``|(F_beta * f)(e) - int F| / |int F|`` per ``beta`` and direction.

    ``directions`` defaults to six seeded random unit vectors.
    """
    d = F.d if d is None else d
    if d != F.d:
        raise ValueError(f"test function lives in R^{F.d}, not R^{d}")
    if d < 3:
        raise DimensionTooSmall(f"d = {d}; the kernel |w|^(2-d) needs d >= 3")
    betas = [float(b) for b in betas]
    if any(b <= 0 for b in betas) or any(x >= y for x, y in zip(betas, betas[1:])):
        raise ValueError("betas must be positive and increasing")
    dirs = random_directions(d, 6) if directions is None else np.atleast_2d(np.asarray(directions, float))
    dirs = dirs / np.linalg.norm(dirs, axis=1, keepdims=True)
    mass = F.integral
    rows = []
    for beta in betas:
        def ev(level, beta=beta):
            return {"value": kernel_convolution(F, beta, dirs, level)}, 0
        vals, errs, _, _ = _adaptive(ev, rtol, 0.0, max_level, 2**62, "approximate_identity_check")
        for i, (v, e) in enumerate(zip(vals["value"], errs["value"])):
            rows.append(IdentityRow(beta, i, float(v), abs(float(v) - mass) / abs(mass), float(e)))
    return IdentityTable(tuple(rows), mass)
