"""Continuous-state autoregressive example ``X_n = A X_{n-1} + eps_n``.

This model has no finite Fourier matrix, so it is checked only through
simulation and exact Gaussian covariance formulas.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .. import rng as rng_mod
from ..errors import ModelValidationError
from .laws import Gaussian


@dataclass(frozen=True, eq=False)
class ContinuousARModel:
    A: np.ndarray
    noise: Gaussian
    name: str = "ar1_gaussian"

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        d = self.noise.dim
        if A.shape != (d, d):
            raise ModelValidationError(f"A must be {d}x{d}, got {A.shape}")
        if np.linalg.norm(A, 2) >= 1.0:
            raise ModelValidationError("A must have spectral norm < 1")
        A.setflags(write=False)
        object.__setattr__(self, "A", A)

    @property
    def d(self) -> int:
        return self.noise.dim

    @property
    def centering(self) -> np.ndarray:
        """``E_pi[X_0] = (I - A)^{-1} E[eps]``."""
        return np.linalg.solve(np.eye(self.d) - self.A, self.noise.mean())

    def stationary_covariance(self) -> np.ndarray:
        """Solution of ``C = A C A^T + Cov(eps)``."""
        C = scipy.linalg.solve_discrete_lyapunov(self.A, self.noise.cov)
        return 0.5 * (C + C.T)

    def asymptotic_covariance(self) -> np.ndarray:
        """``lim Cov(S_n)/n = (I-A)^{-1} Cov(eps) (I-A)^{-T}``."""
        M = np.linalg.inv(np.eye(self.d) - self.A)
        return M @ self.noise.cov @ M.T

    def walk_covariance(self, n: int) -> np.ndarray:
        """Exact ``Cov(S_n)`` for a stationary start.

        Uses ``Cov(X_{j+h}, X_j) = A^h C`` and sums over lags.
        """
        C = self.stationary_covariance()
        out = n * C
        Ah_C = C.copy()
        for h in range(1, n):
            Ah_C = self.A @ Ah_C
            out = out + (n - h) * (Ah_C + Ah_C.T)
        return out


def _factor(cov: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(cov)
    return v * np.sqrt(np.clip(w, 0.0, None))


def simulate_ar(model: ContinuousARModel, n_steps: int, n_traj: int, seed: int,
                block: int = 8192) -> np.ndarray:
    """Sample ``S_n = X_1 + ... + X_n - n E_pi[X_0]`` for ``n_traj`` trajectories.

    ``X_0`` is drawn from the stationary law.  The recursion runs on the
    centred coordinates ``Y = X - E_pi[X_0]``, which obey the same recursion
    with centred noise, so ``S_n`` is just the running sum of ``Y``.
    """
    d = model.d
    L0 = _factor(model.stationary_covariance())
    L_eps = _factor(model.noise.cov)
    out = []
    for b, size in enumerate(rng_mod.block_sizes(n_traj, block)):
        gen = rng_mod.stream(seed, rng_mod.AR_MC, b)
        y = gen.standard_normal((size, d)) @ L0.T
        s = np.zeros((size, d))
        for _ in range(n_steps):
            y = y @ model.A.T + gen.standard_normal((size, d)) @ L_eps.T
            s += y
        out.append(s)
    return np.concatenate(out) if out else np.zeros((0, d))
