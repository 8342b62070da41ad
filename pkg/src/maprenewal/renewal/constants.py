"""Closed-form constants of the centred renewal asymptote."""

from __future__ import annotations

import numpy as np
from scipy.special import gammaln

from ..errors import DimensionTooSmall, SigmaNotPD, ZeroShift


def check_sigma(d: int, Sigma) -> tuple[np.ndarray, float]:
    """Validate ``Sigma`` and return it with ``log det Sigma``."""
    if d < 3:
        raise DimensionTooSmall(f"dimension must be >= 3, got {d}")
    S = np.asarray(Sigma, dtype=float)
    if S.ndim == 0:
        S = S * np.eye(d)
    if S.shape != (d, d):
        raise SigmaNotPD(f"Sigma must be {d}x{d}, got shape {S.shape}")
    if not np.allclose(S, S.T, rtol=1e-10, atol=1e-12):
        raise SigmaNotPD("Sigma is not symmetric")
    try:
        Lc = np.linalg.cholesky(0.5 * (S + S.T))
    except np.linalg.LinAlgError:
        raise SigmaNotPD("Sigma is not positive definite") from None
    return S, 2.0 * float(np.sum(np.log(np.diag(Lc))))


def constant_Cd(d: int, Sigma) -> float:
    """``C_d = pi^{-d/2} Gamma((d-2)/2) / (2 sqrt(det Sigma))``."""
    _, logdet = check_sigma(d, Sigma)
    return float(np.exp(-np.log(2.0) - 0.5 * d * np.log(np.pi) - 0.5 * logdet + gammaln((d - 2) / 2.0)))


def constant_Cd_prime(d: int, Sigma) -> float:
    """``C'_d = (2 pi)^{d/2} 2^{d/2-1} Gamma((d-2)/2) / sqrt(det Sigma)``.

    Equals ``(2 pi)^d C_d``; it is the Fourier-side constant in front of the
    large-``a`` behaviour of ``2 int e^{-i<t,a>} / <Sigma t, t> dt``.
    """
    _, logdet = check_sigma(d, Sigma)
    return float(np.exp(0.5 * d * np.log(2 * np.pi) + (0.5 * d - 1.0) * np.log(2.0)
                        + gammaln((d - 2) / 2.0) - 0.5 * logdet))


def mahalanobis_sq(Sigma, a) -> float:
    a = np.asarray(a, dtype=float)
    return float(a @ np.linalg.solve(Sigma, a))


def asymptote(d: int, Sigma, L0: float, Ld_g: float, a) -> float:
    """``C_d L0 Ld_g / <Sigma^{-1} a, a>^{(d-2)/2}``."""
    S, _ = check_sigma(d, Sigma)
    a = np.asarray(a, dtype=float)
    if a.shape != (d,):
        raise ValueError(f"a must be a {d}-vector")
    if not np.any(a):
        raise ZeroShift("the asymptote needs a != 0")
    if Ld_g == 0 or L0 == 0:
        return 0.0
    return constant_Cd(d, S) * L0 * Ld_g / mahalanobis_sq(S, a) ** ((d - 2) / 2.0)
