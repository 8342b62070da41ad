"""Contour-integral spectral decomposition of ``Q(t)``.

For ``t`` near 0 the spectrum of ``Q(t)`` splits into one eigenvalue
``lambda(t)`` inside the small circle around 1 and the rest inside the
circle of radius ``kappa`` around 0.  Integrating the resolvent over the two
circles gives the rank-one projector ``Pi(t)`` and the remainder powers
``N(t)^n`` with ``Q(t)^n = lambda(t)^n Pi(t) + N(t)^n``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..config import DEFAULT_TOLERANCES, ToleranceProfile
from ..errors import ProjectionFailed, SingularResolvent
from ..markov_model.process import MarkovAdditiveProcess
from .contour import ContourSpec, choose_kappa, standard_contours
from .linalg import resolvent_stack, spectral_radius
from .operator import fourier_operator, fourier_operator_batch


def _ones(n: int) -> np.ndarray:
    return np.ones(n)


@dataclass(frozen=True, eq=False)
class ExpansionTerms:
    """``L = mu(Pi f)`` and ``R_n = mu(N^n f)`` for ``n = 1..n_max``."""

    L_val: complex
    R_n: np.ndarray
    kappa: float

    def decay_constant(self) -> float:
        """Smallest ``C`` with ``|R_n| <= C kappa^n`` over the computed range."""
        n = np.arange(1, len(self.R_n) + 1)
        return float(np.max(np.abs(self.R_n) / self.kappa**n)) if len(n) else 0.0


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    t: np.ndarray
    lam: complex
    Pi: np.ndarray
    kappa: float
    residual: float
    Q: np.ndarray
    completeness: float
    gamma1: ContourSpec
    gamma0: ContourSpec
    _R0: np.ndarray = field(repr=False)

    @property
    def rank(self) -> int:
        s = np.linalg.svd(self.Pi, compute_uv=False)
        return int(np.sum(s > DEFAULT_TOLERANCES.rank_rel_tol * max(1.0, s[0])))

    def N_power(self, n: int) -> np.ndarray:
        """``N(t)^n`` from the inner contour; ``n = 0`` gives the complementary projector."""
        z = self.gamma0.points()
        return self.gamma0.integrate(z[:, None, None] ** n * self._R0)

    def expansion(self, f=None, mu=None, n_max: int = 50) -> ExpansionTerms:
        n = self.Q.shape[0]
        f = _ones(n) if f is None else np.asarray(f, dtype=complex)
        mu = _ones(n) / n if mu is None else np.asarray(mu, dtype=complex)
        z = self.gamma0.points()
        s = np.einsum("i,kij,j->k", mu, self._R0, f)
        powers = z[None, :] ** np.arange(1, n_max + 1)[:, None]
        R = powers @ (self.gamma0.weights() * s)
        return ExpansionTerms(complex(mu @ self.Pi @ f), R, self.kappa)

    def resummed_remainder(self, f=None, mu=None) -> complex:
        """``sum_{n>=1} mu(N^n f)`` via the inner integral of ``z/(1-z) mu((z-Q)^{-1} f)``."""
        n = self.Q.shape[0]
        f = _ones(n) if f is None else np.asarray(f, dtype=complex)
        mu = _ones(n) / n if mu is None else np.asarray(mu, dtype=complex)
        z = self.gamma0.points()
        s = np.einsum("i,kij,j->k", mu, self._R0, f)
        return complex(np.sum(self.gamma0.weights() * z / (1.0 - z) * s))


def _contours(map_, contour, inner, tol):
    kappa = choose_kappa(map_, tol)
    g1, g0 = standard_contours(kappa, tol)
    return kappa, contour or g1, inner or g0


def eigenprojection(map_: MarkovAdditiveProcess, t, contour: ContourSpec | None = None,
                    inner: ContourSpec | None = None,
                    tol: ToleranceProfile = DEFAULT_TOLERANCES) -> SpectralDecomposition:
    """Projector ``Pi(t)`` and eigenvalue ``lambda(t) = tr(Q Pi) / tr(Pi)``.

    Raises :class:`ProjectionFailed` when the outer projector is not a rank-one
    idempotent, or when the two contours do not capture the whole spectrum
    (``||I - Pi - N^0||`` too large).
    """
    kappa, g1, g0 = _contours(map_, contour, inner, tol)
    Q = np.asarray(fourier_operator(map_, t).M)
    t = np.asarray(t, dtype=float)
    n = Q.shape[0]
    Pi = g1.integrate(resolvent_stack(Q, g1.points(), tol.resolvent_max_cond))
    R0 = resolvent_stack(Q, g0.points(), tol.resolvent_max_cond)
    trace = np.trace(Pi)
    if abs(trace) < 0.5:
        raise ProjectionFailed(f"no eigenvalue inside the outer contour at t = {t.tolist()}")
    lam = complex(np.trace(Q @ Pi) / trace)
    residual = float(np.linalg.norm(Pi @ Pi - Pi, 2))
    completeness = float(np.linalg.norm(np.eye(n) - Pi - g0.integrate(R0), 2))
    dec = SpectralDecomposition(t.copy(), lam, Pi, kappa, residual, Q, completeness, g1, g0, R0)
    if residual > tol.projection_residual or dec.rank != 1:
        raise ProjectionFailed(
            f"projector check failed at t = {t.tolist()}: residual {residual:.3g}, rank {dec.rank}"
        )
    if completeness > tol.projection_residual:
        raise ProjectionFailed(
            f"contours miss part of the spectrum at t = {t.tolist()} (defect {completeness:.3g})"
        )
    return dec


def expansion_terms(map_, t, f=None, mu=None, n_max: int = 50,
                    tol: ToleranceProfile = DEFAULT_TOLERANCES) -> ExpansionTerms:
    return eigenprojection(map_, t, tol=tol).expansion(f, mu, n_max)


def lambda_quotient(map_, t, contour: ContourSpec | None = None,
                    tol: ToleranceProfile = DEFAULT_TOLERANCES) -> complex:
    """``lambda = (pi(Q 1) - R_1) / L`` with ``nu = pi`` and ``g = 1``.

    Follows from ``pi(Q 1) = lambda L + R_1``; independent of the trace route.
    """
    dec = eigenprojection(map_, t, contour=contour, tol=tol)
    pi = map_.stationary()
    ones = _ones(map_.n_states)
    terms = dec.expansion(ones, pi, n_max=1)
    return complex((pi @ dec.Q @ ones - terms.R_n[0]) / terms.L_val)


@dataclass(frozen=True)
class RemainderResult:
    R_n: np.ndarray
    resummed: complex
    tail_bound: float
    mismatch: float

    @property
    def consistent(self) -> bool:
        return self.mismatch <= self.tail_bound + 1e-12


def remainder_powers(map_, t, n_max: int, f=None, mu=None,
                     tol: ToleranceProfile = DEFAULT_TOLERANCES) -> RemainderResult:
    """``R_n`` for ``n <= n_max`` plus the resummed series and a tail bound.

    The tail ``sum_{n > n_max} R_n`` is bounded geometrically with the rate
    ``kappa`` and the constant fitted on the computed terms.
    """
    dec = eigenprojection(map_, t, tol=tol)
    terms = dec.expansion(f, mu, n_max)
    C = terms.decay_constant()
    k = dec.kappa
    tail = C * k ** (n_max + 1) / (1.0 - k)
    resummed = dec.resummed_remainder(f, mu)
    mismatch = abs(np.sum(terms.R_n) - resummed)
    return RemainderResult(terms.R_n, resummed, float(tail), float(mismatch))


def expansion_identity_check(map_, t, f=None, mu=None, n: int = 20,
                             tol: ToleranceProfile = DEFAULT_TOLERANCES) -> float:
    """``|mu(Q^n f) - lambda^n L - R_n|``."""
    dec = eigenprojection(map_, t, tol=tol)
    N = map_.n_states
    f = _ones(N) if f is None else np.asarray(f, dtype=complex)
    mu = map_.stationary() if mu is None else np.asarray(mu, dtype=complex)
    direct = mu @ np.linalg.matrix_power(dec.Q, n) @ f
    terms = dec.expansion(f, mu, n_max=max(n, 1))
    return float(abs(direct - dec.lam**n * terms.L_val - (terms.R_n[n - 1] if n else 0.0)))


def decomposition_residual(map_, t, n_max: int = 50,
                           tol: ToleranceProfile = DEFAULT_TOLERANCES) -> float:
    """``max_{n <= n_max} ||Q^n - lambda^n Pi - N^n||_2``."""
    dec = eigenprojection(map_, t, tol=tol)
    z = dec.gamma0.points()
    w = dec.gamma0.weights()
    Qn = np.eye(dec.Q.shape[0], dtype=complex)
    worst = 0.0
    for n in range(1, n_max + 1):
        Qn = Qn @ dec.Q
        Nn = np.einsum("k,kij->ij", w * z**n, dec._R0)
        worst = max(worst, float(np.linalg.norm(Qn - dec.lam**n * dec.Pi - Nn, 2)))
    return worst


def perturbation_radius(map_, r_max: float = 4.0, n_dirs: int = 24, seed: int = 0,
                        steps: int = 40, tol: ToleranceProfile = DEFAULT_TOLERANCES) -> float:
    """Empirical radius of the ball on which :func:`eigenprojection` succeeds.

    Along each direction ``|t|`` grows on a uniform ladder until the first
    failure; the crossing is then refined by bisection.  The minimum over the
    directions is returned.
    """
    key = ("pert_radius", r_max, n_dirs, seed, steps, tol)
    if key in map_._cache:
        return map_._cache[key]
    d = map_.d
    gen = np.random.default_rng(seed)
    dirs = gen.standard_normal((n_dirs, d))
    dirs = np.concatenate([np.eye(d), dirs / np.linalg.norm(dirs, axis=1, keepdims=True)])

    def ok(t):
        try:
            eigenprojection(map_, t, tol=tol)
            return True
        except Exception:
            return False

    best = r_max
    ladder = np.linspace(r_max / steps, r_max, steps)
    for u in dirs:
        lo, hi = 0.0, None
        for r in ladder:
            if r >= best:
                break
            if ok(r * u):
                lo = r
            else:
                hi = r
                break
        if hi is None:
            continue
        for _ in range(30):
            mid = 0.5 * (lo + hi)
            if ok(mid * u):
                lo = mid
            else:
                hi = mid
        best = min(best, lo)
    map_._cache[key] = best
    return best


def ergodicity_check(map_: MarkovAdditiveProcess, n_max: int = 60):
    """``||P^n - 1 pi^T||_2`` for ``n = 1..n_max`` and the fitted geometric rate."""
    P = map_.P
    pi = map_.stationary()
    proj = np.outer(np.ones(map_.n_states), pi)
    norms = np.empty(n_max)
    Pn = np.eye(map_.n_states)
    for n in range(n_max):
        Pn = Pn @ P
        norms[n] = np.linalg.norm(Pn - proj, 2)
    rho2 = spectral_radius(P - proj)
    return norms, rho2


@dataclass(frozen=True)
class SemigroupCheck:
    residual: float
    matrix_residual: float
    stderr: np.ndarray
    deviation: np.ndarray
    exact: np.ndarray
    estimate: np.ndarray


def verify_semigroup(map_, t, m: int, n: int, mc_samples: int, seed: int = 0, f=None) -> SemigroupCheck:
    """Compare ``E_x[e^{i<t,S_{m+n}>} f(X_{m+n})]`` by simulation with ``(Q^{m+n} f)(x)``.

    ``mc_samples`` trajectories are started from every state.  The matrix
    identity ``Q^{m+n} = Q^m Q^n`` is reported alongside.
    """
    from ..markov_model.process import simulate_endpoints

    if m < 1 or n < 1:
        raise ValueError("m and n must be at least 1")
    N = map_.n_states
    Q = np.asarray(fourier_operator(map_, t).M)
    t = np.asarray(t, dtype=float)
    f = _ones(N) if f is None else np.asarray(f, dtype=float)
    Qmn = np.linalg.matrix_power(Q, m + n)
    matrix_residual = float(np.max(np.abs(Qmn - np.linalg.matrix_power(Q, m) @ np.linalg.matrix_power(Q, n))))
    exact = Qmn @ f
    est = np.empty(N, dtype=complex)
    se = np.empty(N)
    for x in range(N):
        mu = np.zeros(N)
        mu[x] = 1.0
        _, xn, sn = simulate_endpoints(map_, mu, m + n, mc_samples, seed=seed * 1_000_003 + x)
        vals = np.exp(1j * (sn @ t)) * f[xn]
        est[x] = vals.mean()
        se[x] = np.sqrt((vals.real.var() + vals.imag.var()) / mc_samples)
    dev = np.abs(est - exact)
    return SemigroupCheck(float(dev.max()), matrix_residual, se, dev, exact, est)


# eigenvector condition above which the diagonal route is not trusted
EIG_COND_MAX = 1e6


def _fields_by_eig(Q, z1, w1, z0, c0, f, mu, tol, lam, L, sR, res) -> np.ndarray:
    """Diagonal route for :func:`spectral_fields`, writing into the output slices.

    With ``Q = V diag(ev) V^{-1}`` every discrete contour sum of resolvents
    becomes a scalar sum per eigenvalue.  Returns the mask of rows left for
    the resolvent route (ill-conditioned eigenvectors).
    """
    ev, V = np.linalg.eig(Q)
    with np.errstate(all="ignore"):
        Vi = np.linalg.inv(V)
        kv = np.linalg.norm(V, 2, axis=(-2, -1)) * np.linalg.norm(Vi, 2, axis=(-2, -1))
    ok = np.isfinite(kv) & (kv < EIG_COND_MAX)
    if not np.any(ok):
        return ~ok
    ev, V, Vi, Qo = ev[ok], V[ok], Vi[ok], Q[ok]
    d1 = z1[None, :, None] - ev[:, None, :]
    d0 = z0[None, :, None] - ev[:, None, :]
    # same screen as the resolvent route: ||A|| ||A^{-1}|| <= kappa(V) max|z-ev| / min|z-ev|
    for dd in (d1, d0):
        ad = np.abs(dd)
        cond = kv[ok] * ad.max(axis=(1, 2)) / ad.min(axis=(1, 2))
        worst = float(np.max(cond))
        if not np.isfinite(worst) or worst > tol.resolvent_max_cond:
            raise SingularResolvent(f"contour passes too close to the spectrum (cond {worst:.3g})")
    g1 = np.einsum("k,tki->ti", w1, 1.0 / d1)
    Pi = np.einsum("tij,tj,tjk->tik", V, g1, Vi)
    tr = np.einsum("tii->t", Pi)
    lam[ok] = np.einsum("tij,tji->t", Qo, Pi) / tr
    res[ok] = np.abs(Pi @ Pi - Pi).max(axis=(-2, -1))
    L[ok] = np.einsum("i,tij,j->t", mu, Pi, f)
    g0 = np.einsum("k,tki->ti", c0, 1.0 / d0)
    sR[ok] = np.einsum("i,tij,tj,tjk,k->t", mu, V, g0, Vi, f)
    return ~ok


@dataclass(frozen=True)
class FieldValues:
    """Spectral quantities on a batch of ``t`` used by the Fourier cubature."""

    lam: np.ndarray
    L: np.ndarray
    sum_R: np.ndarray
    residual: np.ndarray


def spectral_fields(map_, ts, f, mu, tol: ToleranceProfile = DEFAULT_TOLERANCES,
                    chunk: int = 2048) -> FieldValues:
    """``lambda``, ``L = mu(Pi f)`` and ``sum_n mu(N^n f)`` for every row of ``ts``.

    Same contour rules as :func:`eigenprojection`, evaluated in chunks.  The
    inner integral only needs ``mu((z - Q)^{-1} f)``, so it uses vector
    solves instead of full inverses.
    """
    ts = np.atleast_2d(np.asarray(ts, dtype=float))
    kappa = choose_kappa(map_, tol)
    g1, g0 = standard_contours(kappa, tol)
    z1, w1 = g1.points(), g1.weights()
    z0, w0 = g0.points(), g0.weights()
    f = np.asarray(f, dtype=complex)
    mu = np.asarray(mu, dtype=complex)
    N = map_.n_states
    T = len(ts)
    lam = np.empty(T, dtype=complex)
    L = np.empty(T, dtype=complex)
    sR = np.empty(T, dtype=complex)
    res = np.empty(T)
    eye = np.eye(N)
    c0 = w0 * z0 / (1.0 - z0)
    for s in range(0, T, chunk):
        sl = slice(s, s + chunk)
        Q = fourier_operator_batch(map_, ts[sl])
        slow = np.ones(len(Q), dtype=bool)
        if N > 1:
            slow = _fields_by_eig(Q, z1, w1, z0, c0, f, mu, tol, lam[sl], L[sl], sR[sl], res[sl])
        if not np.any(slow):
            continue
        idx = np.arange(s, s + len(Q))[slow]
        Q = Q[slow]
        R1 = resolvent_stack(Q, z1, tol.resolvent_max_cond)
        Pi = np.einsum("k,tkij->tij", w1, R1)
        tr = np.einsum("tii->t", Pi)
        lam[idx] = np.einsum("tij,tji->t", Q, Pi) / tr
        res[idx] = np.abs(Pi @ Pi - Pi).max(axis=(-2, -1))
        L[idx] = np.einsum("i,tij,j->t", mu, Pi, f)
        if N == 1:
            # Q(t) = lambda(t): the remainder vanishes identically
            sR[idx] = 0.0
            continue
        A = z0[:, None, None] * eye - Q[:, None]
        try:
            v = np.linalg.solve(A, np.broadcast_to(f, A.shape[:-1])[..., None])[..., 0]
        except np.linalg.LinAlgError:
            raise SingularResolvent("inner contour node hits the spectrum") from None
        sR[idx] = (v @ mu) @ c0
    bad = res > tol.projection_residual
    if np.any(bad):
        k = int(np.argmax(res))
        raise ProjectionFailed(
            f"projector residual {res[k]:.3g} at t = {ts[k].tolist()}; cutoff radius too large"
        )
    return FieldValues(lam, L, sR, res)
