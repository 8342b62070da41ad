"""Derivatives of ``lambda`` at 0 and the exact moment oracles they must match."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..config import DEFAULT_TOLERANCES, ToleranceProfile
from ..errors import NotCentered
from ..markov_model.process import MarkovAdditiveProcess, mean_increment
from .decomposition import eigenprojection


def _lam(map_, t, tol) -> complex:
    return eigenprojection(map_, t, tol=tol).lam


def exact_walk_moments(map_: MarkovAdditiveProcess, n: int, mu=None):
    """``E_mu[S_n]`` and ``E_mu[S_n S_n^T]`` by exact recursion over the chain.

    With ``a_k(y) = E[S_k; X_k = y]`` and ``b_k(y) = E[S_k S_k^T; X_k = y]``::

        a_k(y) = sum_x P_xy (a_{k-1}(x) + p_{k-1}(x) m_xy)
        b_k(y) = sum_x P_xy (b_{k-1}(x) + a_{k-1}(x) m_xy^T + m_xy a_{k-1}(x)^T
                             + p_{k-1}(x) M2_xy)
    """
    P = map_.P
    m = map_.cell_means()
    M2 = map_.cell_second_moments()
    p = map_.stationary().copy() if mu is None else np.asarray(mu, dtype=float)
    N, d = map_.n_states, map_.d
    a = np.zeros((N, d))
    b = np.zeros((N, d, d))
    for _ in range(n):
        am = np.einsum("xi,xyj->xyij", a, m)
        b = np.einsum("xy,xij->yij", P, b) + np.einsum(
            "xy,xyij->yij", P, am + am.transpose(0, 1, 3, 2) + p[:, None, None, None] * M2
        )
        a = np.einsum("xy,xi->yi", P, a) + np.einsum("xy,x,xyi->yi", P, p, m)
        p = p @ P
    return a.sum(axis=0), b.sum(axis=0)


def autocovariance_series(map_: MarkovAdditiveProcess, k_max: int = 200) -> np.ndarray:
    """``Var_pi(xi_1) + sum_{k=1}^{k_max} (C_k + C_k^T)`` for a centred model.

    ``C_k = E_pi[xi_1 xi_{k+1}^T] = sum_{x,y} pi_x P_xy m_xy ((P^{k-1} mbar)(y))^T``
    where ``mbar(y) = sum_z P_yz m_yz`` is the conditional mean of the next step.
    """
    pi = map_.stationary()
    P = map_.P
    m = map_.cell_means()
    var = np.einsum("x,xy,xyij->ij", pi, P, map_.cell_second_moments())
    left = np.einsum("x,xy,xyi->yi", pi, P, m)  # E[xi_1; X_1 = y]
    mbar = np.einsum("yz,yzi->yi", P, m)
    out = var.copy()
    g = mbar
    for _ in range(k_max):
        C = left.T @ g
        out += C + C.T
        g = P @ g
    return out


def gradient_lambda(map_: MarkovAdditiveProcess, fd_step: float | None = None,
                    tol: ToleranceProfile = DEFAULT_TOLERANCES) -> np.ndarray:
    """``grad lambda(0) / i`` by central differences (Richardson-extrapolated)."""
    h = tol.fd_step if fd_step is None else fd_step
    d = map_.d

    def D(step):
        g = np.empty(d, dtype=complex)
        for j in range(d):
            e = np.zeros(d)
            e[j] = step
            g[j] = (_lam(map_, e, tol) - _lam(map_, -e, tol)) / (2.0 * step)
        return g

    g = D(h)
    if tol.richardson:
        g = (4.0 * D(h / 2.0) - g) / 3.0
    return (g / 1j).real


@dataclass(frozen=True, eq=False)
class CovarianceResult:
    Sigma: np.ndarray
    grad: np.ndarray
    fd_step: float
    asymmetry: float
    moment_sigma: np.ndarray
    moment_rel_err: float

    @property
    def positive_definite(self) -> bool:
        return bool(np.linalg.eigvalsh(self.Sigma).min() > 1e-10 * max(1.0, np.abs(self.Sigma).max()))


def _hessian(map_, h, tol) -> np.ndarray:
    d = map_.d
    lam0 = _lam(map_, np.zeros(d), tol)
    H = np.empty((d, d), dtype=complex)
    for i in range(d):
        ei = np.zeros(d)
        ei[i] = h
        H[i, i] = (_lam(map_, ei, tol) - 2.0 * lam0 + _lam(map_, -ei, tol)) / h**2
        for j in range(i):
            ej = np.zeros(d)
            ej[j] = h
            H[i, j] = (
                _lam(map_, ei + ej, tol) - _lam(map_, ei - ej, tol)
                - _lam(map_, ej - ei, tol) + _lam(map_, -ei - ej, tol)
            ) / (4.0 * h**2)
            H[j, i] = H[i, j]
    return H.real


def asymptotic_covariance(map_: MarkovAdditiveProcess, fd_step: float | None = None,
                          tol: ToleranceProfile = DEFAULT_TOLERANCES, n_check: int = 500) -> CovarianceResult:
    """``Sigma = -Hess lambda(0)`` by second-order central differences.

    Cross-checked against ``E_pi[S_n S_n^T] / n`` from the exact moment recursion.
    """
    drift = mean_increment(map_)
    if np.max(np.abs(drift)) > 1e-10:
        raise NotCentered(f"stationary drift {drift.tolist()} is not zero; centre the model first")
    h = tol.fd_step if fd_step is None else fd_step
    H = _hessian(map_, h, tol)
    if tol.richardson:
        H = (4.0 * _hessian(map_, h / 2.0, tol) - H) / 3.0
    asym = float(np.max(np.abs(H - H.T)))
    Sigma = -0.5 * (H + H.T)
    _, second = exact_walk_moments(map_, n_check)
    ms = second / n_check
    rel = float(np.linalg.norm(Sigma - ms) / np.linalg.norm(ms)) if np.any(ms) else 0.0
    grad = gradient_lambda(map_, h, tol)
    return CovarianceResult(Sigma, grad, h, asym, ms, rel)
