"""Fourier operator matrices ``Q(t)_{xy} = P_{xy} phi_{xy}(t)``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..markov_model.process import MarkovAdditiveProcess


@dataclass(frozen=True, eq=False)
class FourierOperatorMatrix:
    t: np.ndarray
    M: np.ndarray

    def __array__(self, dtype=None, copy=None):
        return self.M if dtype is None else self.M.astype(dtype)

    def power(self, n: int) -> np.ndarray:
        return np.linalg.matrix_power(self.M, n)


def _check_t(map_: MarkovAdditiveProcess, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if t.shape[-1] != map_.d:
        raise ValueError(f"t must have last dimension {map_.d}, got shape {t.shape}")
    return t


def fourier_operator_batch(map_: MarkovAdditiveProcess, ts) -> np.ndarray:
    """``Q(t)`` for every row of ``ts``; returns ``(..., N, N)`` complex."""
    ts = _check_t(map_, ts)
    n = map_.n_states
    out = np.zeros(ts.shape[:-1] + (n, n), dtype=complex)
    for x in range(n):
        for y in range(n):
            p = map_.P[x, y]
            if p > 0.0:
                out[..., x, y] = p * map_.law(x, y).cf(ts)
    return out


def fourier_operator(map_: MarkovAdditiveProcess, t) -> FourierOperatorMatrix:
    t = _check_t(map_, t)
    if t.ndim != 1:
        raise ValueError("fourier_operator takes a single t; use fourier_operator_batch")
    M = fourier_operator_batch(map_, t)
    M.setflags(write=False)
    return FourierOperatorMatrix(t.copy(), M)
