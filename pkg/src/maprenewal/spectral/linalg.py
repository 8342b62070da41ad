"""Dominant moduli and resolvent solves for small complex matrices."""

from __future__ import annotations

import numpy as np

from ..config import DEFAULT_TOLERANCES
from ..errors import NoConvergence, SingularResolvent


def _as_matrix(M) -> np.ndarray:
    M = np.asarray(getattr(M, "M", M), dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    return M


def spectral_radius(M, tol: float = DEFAULT_TOLERANCES.power_tol,
                    max_iter: int = DEFAULT_TOLERANCES.power_max_iter, seed: int = 0) -> float:
    """Largest eigenvalue modulus by block power iteration.

    A block of ``min(N, 3)`` complex random vectors is iterated and
    re-orthonormalised; the radius is read off the Ritz values of the block.
    Using a block rather than one vector keeps the iteration convergent when
    the dominant eigenvalues form a conjugate pair or several share a modulus
    (a single vector would oscillate forever in that case).
    """
    A = _as_matrix(M)
    n = A.shape[0]
    if n == 1:
        return float(abs(A[0, 0]))
    scale = np.linalg.norm(A, np.inf)
    if scale == 0.0:
        return 0.0
    A = A / scale
    k = min(n, 3)
    gen = np.random.default_rng(seed)
    V, _ = np.linalg.qr(gen.standard_normal((n, k)) + 1j * gen.standard_normal((n, k)))
    prev = np.inf
    for _ in range(max_iter):
        W = A @ V
        if not np.any(W):
            return 0.0
        rho = float(np.max(np.abs(np.linalg.eigvals(V.conj().T @ W))))
        V, _ = np.linalg.qr(W)
        if abs(rho - prev) <= tol:
            return rho * scale
        prev = rho
    raise NoConvergence(f"block power iteration did not settle in {max_iter} steps")


def subdominant_modulus(P, pi, **kw) -> float:
    """Second-largest eigenvalue modulus of a stochastic ``P``.

    Deflates the Perron pair: ``P - 1 pi^T`` has the spectrum of ``P`` with
    the eigenvalue 1 replaced by 0.
    """
    P = np.asarray(P, dtype=float)
    return spectral_radius(P - np.outer(np.ones(P.shape[0]), pi), **kw)


def resolvent_apply(M, z: complex, v, max_cond: float = DEFAULT_TOLERANCES.resolvent_max_cond,
                    residual_tol: float = DEFAULT_TOLERANCES.resolvent_residual) -> np.ndarray:
    """Solve ``(z I - M) w = v`` by LU with partial pivoting."""
    M = _as_matrix(M)
    A = z * np.eye(M.shape[0]) - M
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > max_cond:
        raise SingularResolvent(f"z = {z!r} is too close to the spectrum (cond {cond:.3g})")
    v = np.asarray(v, dtype=complex)
    w = np.linalg.solve(A, v)
    res = np.linalg.norm(A @ w - v)
    if res > residual_tol * max(np.linalg.norm(v), np.finfo(float).tiny):
        raise SingularResolvent(f"resolvent residual {res:.3g} above tolerance")
    return w


def resolvent_stack(Q, z, max_cond: float = DEFAULT_TOLERANCES.resolvent_max_cond) -> np.ndarray:
    """``(z_k I - Q)^{-1}`` for a stack of matrices and a vector of nodes.

    ``Q`` has shape ``(..., N, N)`` and ``z`` shape ``(K,)``; the result has
    shape ``(..., K, N, N)``.  Conditioning is screened with the cheap
    1-norm estimate ``||A||_1 ||A^{-1}||_1``.
    """
    Q = np.asarray(Q, dtype=complex)
    z = np.asarray(z, dtype=complex)
    n = Q.shape[-1]
    A = z[:, None, None] * np.eye(n) - Q[..., None, :, :]
    try:
        R = np.linalg.inv(A)
    except np.linalg.LinAlgError:
        raise SingularResolvent("contour node hits the spectrum exactly") from None
    cond = np.abs(A).sum(axis=-2).max(axis=-1) * np.abs(R).sum(axis=-2).max(axis=-1)
    worst = np.max(cond) if cond.size else 0.0
    if not np.isfinite(worst) or worst > max_cond:
        raise SingularResolvent(f"contour passes too close to the spectrum (cond {worst:.3g})")
    return R
