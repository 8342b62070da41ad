"""Trajectory Monte Carlo for truncated renewal sums.

``sum_{n=1}^{n_max} E_mu[f(X_n) g(S_n - a)]`` is estimated from independent
trajectories, with ``g`` a ball indicator or the smooth test function ``h``.
Several shifts ``a`` are served by the same trajectories (common random
numbers), each with its own truncation length.

The remainder ``sum_{n > n_max}`` is replaced by its Gaussian approximation
``pi(f) int g  sum_{n > n_max} phi_{n Sigma}(a)``, summed in closed form via
the incomplete gamma function.  What is left of the tail (local-CLT
corrections, plus the part of ``h`` beyond its table) goes into
``tail_bound``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma, gammainc

from .. import rng as rng_mod
from ..errors import TailNotNegligible
from ..markov_model.process import MarkovAdditiveProcess, _check_mu, sampler
from .constants import check_sigma, mahalanobis_sq
from .estimate import RenewalEstimate
from .testfunc import TestFunctionH


@dataclass(frozen=True)
class Ball:
    """Indicator of the closed ball of radius ``radius`` about the origin."""

    radius: float = 1.0

    def volume(self, d: int) -> float:
        return math.pi ** (d / 2.0) / gamma(d / 2.0 + 1.0) * self.radius**d

    def evaluate_sq(self, r2) -> np.ndarray:
        return (np.asarray(r2) <= self.radius**2).astype(float)


def _integral(region, d: int) -> float:
    return region.volume(d) if isinstance(region, Ball) else region.integral


def gaussian_tail_sum(Sigma, a, n_max: int) -> float:
    """``sum_{n > n_max} phi_{n Sigma}(a)`` for the centred Gaussian density ``phi``.

    The sum is the integral ``int_{n_max}^inf`` in closed form (incomplete
    gamma) minus the first two Euler-Maclaurin boundary terms.
    """
    d = len(a)
    S, logdet = check_sigma(d, Sigma)
    q = mahalanobis_sq(S, a)
    c = (2.0 * math.pi) ** (-d / 2.0) * math.exp(-0.5 * logdet)
    N = float(n_max)
    s = d / 2.0 - 1.0
    integral = c * (q / 2.0) ** (-s) * gamma(s) * gammainc(s, q / (2.0 * N))
    gN = c * N ** (-d / 2.0) * math.exp(-q / (2.0 * N))
    dgN = gN * (-d / (2.0 * N) + q / (2.0 * N * N))
    return float(integral - 0.5 * gN - dgN / 12.0)


def tail_roughness(map_: MarkovAdditiveProcess, Sigma, mu=None) -> tuple[float, float]:
    """Heuristic constants for the local-CLT error of the tail correction.

    Returns ``(skew, offset)``.  ``skew`` stands in for the standardised
    third cumulant of the walk: the largest within-cell skewness plus the
    spread of cell means, inflated by the mixing time ``1/(1 - rho_2)``.
    ``offset`` is ``|E_mu[S_infinity]|``, the shift caused by a non-stationary
    start.
    """
    from ..spectral import subdominant_modulus
    from ..spectral.moments import exact_walk_moments

    lmin = float(np.linalg.eigvalsh(Sigma).min())
    n = map_.n_states
    laws = [map_.law(x, y) for x in range(n) for y in range(n) if map_.P[x, y] > 0]
    skew = max(law.axis_skewness() for law in laws)
    means = map_.cell_means().reshape(-1, map_.d)[map_.P.reshape(-1) > 0]
    spread = float(np.max(np.linalg.norm(means, axis=1))) / math.sqrt(lmin)
    rho2 = subdominant_modulus(map_.P, map_.stationary()) if n > 1 else 0.0
    skew = (skew + 3.0 * spread) / (1.0 - rho2)
    offset = 0.0
    if mu is not None and n > 1:
        mu = np.asarray(mu, dtype=float)
        if not np.allclose(mu, map_.stationary(), atol=1e-14):
            m_mu, _ = exact_walk_moments(map_, 200, mu)
            offset = float(np.linalg.norm(m_mu))
    return skew, offset


def _batch_stderr(Y: np.ndarray, batches: int) -> np.ndarray:
    if len(Y) < 2:
        return np.zeros(Y.shape[1:])
    parts = np.array_split(Y, min(batches, len(Y)))
    m = np.array([p.mean(axis=0) for p in parts])
    return m.std(axis=0, ddof=1) / math.sqrt(len(m))


def renewal_sums_mc(map_: MarkovAdditiveProcess, f, mu, a_list, region, n_traj: int,
                    n_max=None, seed: int = 0, Sigma=None, n_factor: float = 10.0,
                    tail_correction: bool = True, check_tail: bool = True,
                    block: int = 4096, chunk: int = 256, batches: int = 40) -> list[RenewalEstimate]:
    """Monte Carlo renewal sums for every shift in ``a_list``.

    Parameters
    ----------
    region : Ball or TestFunctionH
        ``g`` in ``g(S_n - a)``.
    n_max : int, sequence of int, or None
        Truncation per shift.  ``None`` runs every shift to
        ``n_factor * max_a <Sigma^{-1} a, a>``; the trajectories have to be
        that long for the farthest shift anyway.
    Sigma : array, optional
        Asymptotic covariance for the tail correction; computed from the
        model when omitted.

    Raises
    ------
    TailNotNegligible
        If ``check_tail`` and the residual tail bound exceeds 10% of the
        standard error for some shift.
    """
    d = map_.d
    f = np.asarray(f, dtype=float)
    mu = _check_mu(mu, map_.n_states)
    a_arr = np.atleast_2d(np.asarray(a_list, dtype=float))
    n_a = len(a_arr)
    if Sigma is None:
        from ..spectral import asymptotic_covariance

        Sigma = asymptotic_covariance(map_).Sigma
    Sigma = np.asarray(Sigma, dtype=float)
    q = np.array([mahalanobis_sq(Sigma, a) for a in a_arr])
    if n_max is None:
        nm = np.full(n_a, int(math.ceil(n_factor * q.max())))
    else:
        nm = np.broadcast_to(np.asarray(n_max, dtype=int), (n_a,)).copy()
    if np.any(nm < 1):
        raise ValueError("n_max must be at least 1")
    total = int(nm.max())
    a_sq = (a_arr**2).sum(axis=1)

    Y = np.zeros((n_traj, n_a))
    if np.any(f != 0.0):
        smp = sampler(map_)
        start = 0
        for b, size in enumerate(rng_mod.block_sizes(n_traj, block)):
            gen = rng_mod.stream(seed, rng_mod.RENEWAL_MC, b)
            x = smp.initial_states(mu, size, gen)
            S = np.zeros((size, d))
            acc = np.zeros((size, n_a))
            done = 0
            while done < total:
                T = min(chunk, total - done)
                st, inc = smp.steps(x, T, gen)
                path = np.cumsum(inc, axis=0)
                path += S
                x, S = st[-1], path[-1]
                fw = f[st]
                sq = np.einsum("tbi,tbi->tb", path, path)
                proj = path @ a_arr.T  # (T, B, n_a)
                for j in range(n_a):
                    tj = int(min(T, nm[j] - done))
                    if tj <= 0:
                        continue
                    r2 = sq[:tj] - 2.0 * proj[:tj, :, j] + a_sq[j]
                    acc[:, j] += np.einsum("tb,tb->b", fw[:tj], region.evaluate_sq(r2))
                done += T
            Y[start:start + size] = acc
            start += size

    value = Y.mean(axis=0)
    se = _batch_stderr(Y, batches)
    L0 = float(map_.stationary() @ f)
    G = _integral(region, d)
    lmin = float(np.linalg.eigvalsh(Sigma).min())
    skew, offset = tail_roughness(map_, Sigma, mu) if L0 != 0.0 else (0.0, 0.0)
    width2 = (region.radius if isinstance(region, Ball) else 3.0 / region.b) ** 2
    out = []
    for j in range(n_a):
        N = int(nm[j])
        T = L0 * G * gaussian_tail_sum(Sigma, a_arr[j], N) if (tail_correction and L0 != 0.0) else 0.0
        rel = (skew * math.sqrt(q[j] / N) / (2.0 * math.sqrt(N))
               + (d + width2 / lmin + offset * math.sqrt(q[j] / lmin)) / N)
        tb = abs(T) * rel if tail_correction else 0.0
        if isinstance(region, TestFunctionH) and L0 != 0.0:
            tb += N * float(np.max(np.abs(f))) * region.envelope(region.radius)
        if check_tail and tb > 0.1 * se[j]:
            raise TailNotNegligible(
                f"a = {a_arr[j].tolist()}: tail bound {tb:.3g} exceeds 10% of stderr {se[j]:.3g}; "
                f"raise n_max (now {N})"
            )
        out.append(RenewalEstimate(
            value=float(value[j] + T), stderr=float(se[j]), n_max=N, n_traj=int(n_traj),
            tail_bound=float(tb), route="mc", a=tuple(float(v) for v in a_arr[j]),
            tail_correction=float(T),
        ))
    return out


def renewal_sum_mc(map_, f, mu, a, region, n_traj: int, n_max=None, seed: int = 0,
                   **kw) -> RenewalEstimate:
    return renewal_sums_mc(map_, f, mu, [a], region, n_traj, n_max, seed, **kw)[0]


def iid_gaussian_ball_sum(d: int, radius: float, norm_a: float, n_terms: int = 200_000) -> float:
    """Exact ``sum_{n>=1} P(|S_n - a| <= radius)`` for standard Gaussian steps.

    ``|S_n - a|^2 / n`` is noncentral chi-square with ``d`` degrees of
    freedom and noncentrality ``|a|^2 / n``.  Terms past ``n_terms`` use the
    Gaussian density at ``a`` times the ball volume, whose relative error
    there is ``O(radius^2 / n_terms)``.
    """
    from scipy.stats import ncx2

    n = np.arange(1, n_terms + 1, dtype=float)
    head = float(ncx2.cdf(radius**2 / n, d, norm_a**2 / n).sum())
    a = np.zeros(d)
    a[0] = norm_a
    return head + Ball(radius).volume(d) * gaussian_tail_sum(np.eye(d), a, n_terms)
