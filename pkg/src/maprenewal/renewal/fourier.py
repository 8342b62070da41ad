"""Fourier-side evaluation of renewal sums.

For a test function ``h`` with compactly supported ``hat h``,
``(2 pi)^d sum_{n>=1} E_mu[f(X_n) h(S_n - a)] = int hat h(t) sum_n E_n(t) e^{-i<t,a>} dt``
with ``E_n(t) = mu(Q(t)^n f)``.  A radial cutoff ``chi`` splits the integral:

* ``I``: ``chi hat h lambda L / (1 - lambda)``, the dominant-eigenvalue part,
  further split into ``I_1 + I_2 + I_3`` around the quadratic model
  ``1 - lambda ~ <Sigma t, t> / 2``;
* ``J``: ``chi hat h sum_n R_n``, the remainder part;
* ``K``: ``(1 - chi) hat h sum_n E_n``, away from the origin.

Every piece is integrated with the spherical product rule of
:mod:`.cubature`, refined until successive levels agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..config import DEFAULT_TOLERANCES, ToleranceProfile
from ..errors import NotCentered, QuadratureBudgetExceeded, SingularResolvent
from ..markov_model.process import MarkovAdditiveProcess, mean_increment
from ..spectral import (
    asymptotic_covariance,
    fourier_operator,
    fourier_operator_batch,
    perturbation_radius,
    resolvent_apply,
    resolvent_stack,
    spectral_fields,
    spectral_radius,
)
from .constants import check_sigma, constant_Cd_prime, mahalanobis_sq
from .cubature import BallGrid, Panel
from .estimate import RenewalEstimate
from .testfunc import CutoffFunction, TestFunctionH

COMPONENTS = ("I1", "I2", "I3", "I", "J", "K")


def resolvent_characteristic_sum(map_: MarkovAdditiveProcess, f, mu, t,
                                 tol: ToleranceProfile = DEFAULT_TOLERANCES) -> complex:
    """``sum_{n>=1} mu(Q(t)^n f) = mu((I - Q(t))^{-1} Q(t) f)``."""
    Q = fourier_operator(map_, t).M
    rho = spectral_radius(Q, tol=tol.power_tol, max_iter=tol.power_max_iter)
    if rho >= 1.0 - tol.lattice_margin:
        raise SingularResolvent(f"spectral radius {rho:.12g} at t = {np.asarray(t).tolist()}")
    f = np.asarray(f, dtype=complex)
    w = resolvent_apply(Q, 1.0, Q @ f, tol.resolvent_max_cond, tol.resolvent_residual)
    return complex(np.asarray(mu) @ w)


def lattice_scan(map_: MarkovAdditiveProcess, r_min: float, r_max: float,
                 spacing: float = 2.0 * np.pi / 8.0,
                 margin: float = DEFAULT_TOLERANCES.lattice_margin) -> float:
    """Largest spectral radius over the grid ``spacing * Z^d`` within ``r_min < |t| <= r_max``.

    Raises :class:`SingularResolvent` when it reaches ``1 - margin``: the
    characteristic sum then diverges somewhere on the integration domain.
    """
    d = map_.d
    k = int(math.floor(r_max / spacing))
    ax = np.arange(-k, k + 1) * spacing
    grid = np.stack(np.meshgrid(*([ax] * d), indexing="ij"), axis=-1).reshape(-1, d)
    nrm = np.linalg.norm(grid, axis=1)
    grid = grid[(nrm > r_min) & (nrm <= r_max)]
    worst, worst_t = 0.0, None
    for t in grid:
        rho = spectral_radius(fourier_operator(map_, t))
        if rho > worst:
            worst, worst_t = rho, t
    if worst >= 1.0 - margin:
        raise SingularResolvent(
            f"spectral radius {worst:.12g} at t = {worst_t.tolist()}: the model looks lattice"
        )
    return worst


def lambda_inequality_radius(map_, Sigma, r_max: float, n_dirs: int = 24, steps: int = 60,
                             seed: int = 0, tol: ToleranceProfile = DEFAULT_TOLERANCES) -> float:
    """Largest ``alpha <= r_max`` with ``|lambda(t)| <= 1 - <Sigma t, t>/4`` on sampled rays."""
    from ..spectral import eigenprojection

    d = map_.d
    gen = np.random.default_rng(seed)
    dirs = gen.standard_normal((n_dirs, d))
    dirs = np.concatenate([np.eye(d), dirs / np.linalg.norm(dirs, axis=1, keepdims=True)])
    best = r_max
    for u in dirs:
        for rad in np.linspace(r_max / steps, r_max, steps):
            if rad >= best:
                break
            t = rad * u
            try:
                lam = eigenprojection(map_, t, tol=tol).lam
            except Exception:
                best = rad
                break
            if abs(lam) > 1.0 - 0.25 * t @ Sigma @ t:
                best = rad
                break
    return best


def default_cutoff(map_: MarkovAdditiveProcess, Sigma=None, inner_fraction: float = 0.5,
                   tol: ToleranceProfile = DEFAULT_TOLERANCES) -> CutoffFunction:
    """``alpha`` = half the verified perturbation radius, ``r = inner_fraction * alpha``.

    ``alpha`` is also capped by the radius on which the quadratic bound on
    ``|lambda|`` holds.
    """
    alpha = 0.5 * perturbation_radius(map_, tol=tol)
    if Sigma is not None:
        alpha = min(alpha, lambda_inequality_radius(map_, Sigma, alpha, tol=tol))
    return CutoffFunction(alpha=alpha, r=inner_fraction * alpha)


@dataclass(frozen=True)
class FourierSplit:
    """The six Fourier integrals at one shift ``a`` (not yet divided by ``(2 pi)^d``)."""

    a: np.ndarray
    I1: complex
    I2: complex
    I3: complex
    I: complex
    J: complex
    K: complex
    quadrature_error: float
    errors: dict = field(default_factory=dict)
    n_points: int = 0
    level: int = 0

    @property
    def total(self) -> complex:
        return self.I + self.J + self.K

    @property
    def split_residual(self) -> float:
        return abs(self.I - (self.I1 + self.I2 + self.I3))

    @property
    def d(self) -> int:
        return len(self.a)

    @property
    def renewal_value(self) -> complex:
        return self.total / (2.0 * np.pi) ** self.d

    def components(self) -> dict:
        return {c: getattr(self, c) for c in COMPONENTS}


def _group_by_direction(a_list):
    groups: dict = {}
    for i, a in enumerate(a_list):
        nrm = float(np.linalg.norm(a))
        if nrm == 0.0:
            raise ValueError("a must be non-zero")
        key = tuple(np.round(np.asarray(a) / nrm, 12))
        groups.setdefault(key, []).append(i)
    return groups


def _adaptive(evaluate, rtol: float, atol: float, max_level: int, budget: int, what: str):
    """Refine until two successive levels agree; return the finer values and errors.

    ``evaluate(level)`` returns ``(values, n_points)`` where ``values`` maps a
    component name to an array over the shifts.
    """
    prev, used = None, 0
    for level in range(max_level + 1):
        vals, npts = evaluate(level)
        used += npts
        if prev is not None:
            errs = {k: np.abs(vals[k] - prev[k]) for k in vals}
            scale = np.max(np.abs(np.stack([vals[k] for k in vals])), axis=0)
            worst = np.max(np.stack(list(errs.values())), axis=0)
            if np.all(worst <= rtol * scale + atol):
                return vals, errs, level, npts
        if used > budget:
            break
        prev = vals
    raise QuadratureBudgetExceeded(
        f"{what}: levels did not agree within rtol={rtol:g} after {used} points"
    )


class FourierRenewal:
    """Fourier-route evaluator for one model, test function and cutoff.

    Spectral fields on the cubature nodes do not depend on ``a``; shifts that
    share a direction share one grid, sized for the largest ``|a|``.
    """

    def __init__(self, map_: MarkovAdditiveProcess, f=None, mu=None, h: TestFunctionH | None = None,
                 chi: CutoffFunction | None = None, Sigma=None,
                 tol: ToleranceProfile = DEFAULT_TOLERANCES, rtol: float = 1e-7, atol: float = 1e-13,
                 max_level: int = 3, budget: int = 3_000_000, scan: bool = True):
        self.map = map_
        n, d = map_.n_states, map_.d
        self.d = d
        self.f = np.ones(n) if f is None else np.asarray(f, dtype=float)
        self.mu = map_.stationary() if mu is None else np.asarray(mu, dtype=float)
        self.tol = tol
        self.h = TestFunctionH(d=d) if h is None else h
        if self.h.d != d:
            raise ValueError("test function dimension does not match the model")
        if scan:
            # before anything expensive: the negative control must fail fast
            lattice_scan(map_, 0.0, self.h.b, margin=tol.lattice_margin)
        drift = mean_increment(map_)
        if np.max(np.abs(drift)) > 1e-10:
            raise NotCentered(f"stationary drift {drift.tolist()} is not zero")
        self.Sigma = asymptotic_covariance(map_, tol=tol).Sigma if Sigma is None else np.asarray(Sigma)
        check_sigma(d, self.Sigma)
        self.chi = default_cutoff(map_, self.Sigma, tol=tol) if chi is None else chi
        if self.h.b < self.chi.alpha:
            raise ValueError("the support radius b of hat h must be at least chi.alpha")
        self.L0 = float(np.real(map_.stationary() @ self.f))
        self.rtol, self.atol = rtol, atol
        self.max_level, self.budget = max_level, budget
        self._fields: dict = {}

    # -- grids and integrands -------------------------------------------------

    def _grids(self, axis, A: float, level: int):
        s = 1.5**level
        r, al, b = self.chi.r, self.chi.alpha, self.h.b

        def nr(lo, hi, extra=0):
            return int(math.ceil(s * (A * (hi - lo) / 4.0 + 16 + extra)))

        n_phi = 2 * int(math.ceil(s * 8))
        ball = BallGrid.build(self.d, axis, [Panel(0.0, r, nr(0.0, r)), Panel(r, al, nr(r, al, 16))],
                              int(math.ceil(s * (A * al / 2.0 + 16))), n_phi)
        shell = BallGrid.build(self.d, axis, [Panel(r, al, nr(r, al, 16)), Panel(al, b, nr(al, b))],
                               int(math.ceil(s * (A * b / 2.0 + 16))), n_phi)
        return ball, shell

    def _integrands(self, axis, A: float, level: int):
        key = (axis, round(A, 12), level)
        if key in self._fields:
            return self._fields[key]
        ball, shell = self._grids(np.asarray(axis), A, level)
        fv = spectral_fields(self.map, ball.t, self.f, self.mu, self.tol)
        lam, L = fv.lam, fv.L
        chi = self.chi.radial(ball.rho)
        hat = self.h.hat_radial(ball.rho)
        q = np.einsum("ti,ij,tj->t", ball.t, self.Sigma, ball.t)
        c0 = self.h.hat0 * self.L0
        one_m = 1.0 - lam
        ball_terms = {
            "I": chi * hat * lam * L / one_m,
            "I1": chi * (hat * lam * L - c0) / one_m,
            "I2": 2.0 * c0 * chi / q,
            "I3": 2.0 * c0 * chi * ((lam - 1.0) + 0.5 * q) / (one_m * q),
            "J": chi * hat * fv.sum_R,
        }
        Q = fourier_operator_batch(self.map, shell.t)
        R = resolvent_stack(Q, np.array([1.0]), self.tol.resolvent_max_cond)[:, 0]
        E = np.einsum("i,tij,tjk,k->t", self.mu, R, Q, self.f)
        chi_s = self.chi.radial(shell.rho)
        shell_terms = {"K": (1.0 - chi_s) * self.h.hat_radial(shell.rho) * E}
        out = (ball, ball_terms, shell, shell_terms)
        self._fields[key] = out
        return out

    def _values(self, axis, norms, level):
        ball, bt, shell, st = self._integrands(axis, float(max(norms)), level)
        vals = {k: np.empty(len(norms), dtype=complex) for k in COMPONENTS}
        for j, A in enumerate(norms):
            pb = ball.w * ball.phase(A)
            for k, v in bt.items():
                vals[k][j] = pb @ v
            vals["K"][j] = (shell.w * shell.phase(A)) @ st["K"]
        return vals, len(ball) + len(shell)

    # -- public ---------------------------------------------------------------

    def splits(self, a_list) -> list[FourierSplit]:
        a_list = [np.asarray(a, dtype=float) for a in a_list]
        out: list = [None] * len(a_list)
        for axis, idx in _group_by_direction(a_list).items():
            norms = [float(np.linalg.norm(a_list[i])) for i in idx]
            vals, errs, level, npts = _adaptive(
                lambda lev: self._values(axis, norms, lev),
                self.rtol, self.atol, self.max_level, self.budget, "fourier_split",
            )
            for j, i in enumerate(idx):
                e = {k: float(errs[k][j]) for k in errs}
                qerr = e["I"] + e["J"] + e["K"]
                out[i] = FourierSplit(a_list[i], *(complex(vals[k][j]) for k in COMPONENTS),
                                      quadrature_error=qerr, errors=e, n_points=npts, level=level)
        return out

    def split(self, a) -> FourierSplit:
        return self.splits([a])[0]

    def estimates(self, a_list) -> list[RenewalEstimate]:
        res = []
        scale = (2.0 * np.pi) ** self.d
        for s in self.splits(a_list):
            res.append(RenewalEstimate(
                value=float(s.total.real / scale), stderr=0.0, n_max=0, n_traj=0, tail_bound=0.0,
                route="fourier", a=tuple(float(x) for x in s.a),
                quadrature_error=float(s.quadrature_error / scale + abs(s.total.imag) / scale),
                components={k: complex(v) for k, v in s.components().items()},
            ))
        return res


def fourier_split(map_, f, mu, h, chi, a, **kw) -> FourierSplit:
    return FourierRenewal(map_, f, mu, h, chi, **kw).split(a)


def renewal_sum_fourier(map_, f, mu, h, chi, a_list, **kw) -> list[RenewalEstimate]:
    return FourierRenewal(map_, f, mu, h, chi, **kw).estimates(a_list)


@dataclass(frozen=True)
class DecayTable:
    norm_a: np.ndarray
    jk_scaled: np.ndarray
    i13_scaled: np.ndarray

    @property
    def jk_drop(self) -> float:
        return float(self.jk_scaled[0] / self.jk_scaled[-1])

    @property
    def i13_drop(self) -> float:
        return float(self.i13_scaled[0] / self.i13_scaled[-1])


def decay_check_J_K(map_, f, mu, h, chi, a_sequence, engine: FourierRenewal | None = None,
                    **kw) -> DecayTable:
    """``|a|^{d-2} |J + K|`` and ``|a|^{d-2} |I_1 + I_3|`` along ``a_sequence``."""
    eng = engine or FourierRenewal(map_, f, mu, h, chi, **kw)
    splits = eng.splits(a_sequence)
    d = map_.d
    na = np.array([np.linalg.norm(s.a) for s in splits])
    jk = np.array([abs(s.J + s.K) for s in splits]) * na ** (d - 2)
    i13 = np.array([abs(s.I1 + s.I3) for s in splits]) * na ** (d - 2)
    return DecayTable(na, jk, i13)


@dataclass(frozen=True)
class I2Row:
    norm_a: float
    beta: float
    I2: complex
    predicted: float
    ratio: float
    error: float


def i2_asymptotic_check(Sigma, h: TestFunctionH, chi: CutoffFunction, a_sequence, L0: float = 1.0,
                        rtol: float = 1e-9, atol: float = 1e-14, max_level: int = 4,
                        budget: int = 4_000_000) -> list[I2Row]:
    """``I_2(a)`` by cubature against ``C'_d hat h(0) L0 / beta^{d-2}``, ``beta^2 = <Sigma^{-1} a, a>``."""
    a_list = [np.asarray(a, dtype=float) for a in a_sequence]
    d = len(a_list[0])
    S, _ = check_sigma(d, Sigma)
    Cp = constant_Cd_prime(d, S)
    c0 = h.hat0 * L0
    rows: list = [None] * len(a_list)
    for axis, idx in _group_by_direction(a_list).items():
        norms = [float(np.linalg.norm(a_list[i])) for i in idx]
        A = max(norms)

        def ev(level):
            s = 1.5**level
            r, al = chi.r, chi.alpha
            n_phi = 2 * int(math.ceil(s * 8))
            nr = lambda lo, hi, x=0: int(math.ceil(s * (A * (hi - lo) / 4.0 + 16 + x)))
            g = BallGrid.build(d, np.asarray(axis), [Panel(0.0, r, nr(0.0, r)), Panel(r, al, nr(r, al, 16))],
                               int(math.ceil(s * (A * al / 2.0 + 16))), n_phi)
            q = np.einsum("ti,ij,tj->t", g.t, S, g.t)
            integrand = 2.0 * c0 * chi.radial(g.rho) / q
            return {"I2": np.array([(g.w * g.phase(n)) @ integrand for n in norms])}, len(g)

        vals, errs, _, _ = _adaptive(ev, rtol, atol, max_level, budget, "i2_asymptotic_check")
        for j, i in enumerate(idx):
            beta = math.sqrt(mahalanobis_sq(S, a_list[i]))
            pred = Cp * c0 / beta ** (d - 2)
            I2 = complex(vals["I2"][j])
            rows[i] = I2Row(norms[j], beta, I2, pred, I2.real / pred, float(errs["I2"][j]))
    return rows
