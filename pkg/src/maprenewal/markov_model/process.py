"""Finite-state Markov additive processes.

A process is a driving chain ``X`` on ``N`` states with transition matrix
``P`` plus, for every transition ``x -> y``, the law of the increment
``S_n - S_{n-1}`` on ``R^d``.  ``S_0 = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .. import rng as rng_mod
from ..config import DEFAULT_TOLERANCES
from ..errors import ModelValidationError, NotErgodic
from .laws import IncrementLaw


@dataclass(frozen=True)
class StateSpace:
    size: int
    labels: tuple = ()

    def __post_init__(self):
        if int(self.size) < 1:
            raise ModelValidationError("state space needs at least one state")
        labels = tuple(self.labels) if self.labels else tuple(str(i) for i in range(self.size))
        if len(labels) != self.size:
            raise ModelValidationError(
                f"expected {self.size} state labels, got {len(labels)}"
            )
        if len(set(labels)) != len(labels):
            raise ModelValidationError("state labels must be unique")
        object.__setattr__(self, "size", int(self.size))
        object.__setattr__(self, "labels", labels)


def validate_transition_matrix(P, tol: float = DEFAULT_TOLERANCES.row_sum) -> np.ndarray:
    """Return ``P`` as a read-only float array, or raise naming the first bad cell."""
    P = np.array(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ModelValidationError(f"transition matrix must be square, got shape {P.shape}")
    for i in range(P.shape[0]):
        for j in range(P.shape[1]):
            v = P[i, j]
            if not np.isfinite(v) or v < 0.0 or v > 1.0:
                raise ModelValidationError(
                    f"transition[{i}][{j}] = {float(v)!r} is not a probability"
                )
        s = P[i].sum()
        if abs(s - 1.0) > tol:
            raise ModelValidationError(f"transition row {i} sums to {float(s)!r}, not 1")
    P.setflags(write=False)
    return P


@dataclass(frozen=True, eq=False)
class MarkovAdditiveProcess:
    states: StateSpace
    P: np.ndarray
    increments: tuple  # N x N tuple of IncrementLaw
    dimension: int
    name: str = "map"
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        P = validate_transition_matrix(self.P)
        n = self.states.size
        if P.shape[0] != n:
            raise ModelValidationError(
                f"transition matrix is {P.shape[0]}x{P.shape[0]} but there are {n} states"
            )
        if int(self.dimension) < 3:
            raise ModelValidationError(f"dimension must be >= 3, got {self.dimension}")
        incs = tuple(tuple(row) for row in self.increments)
        if len(incs) != n or any(len(row) != n for row in incs):
            raise ModelValidationError(f"increments must be an {n}x{n} array of laws")
        for i, row in enumerate(incs):
            for j, law in enumerate(row):
                if not isinstance(law, IncrementLaw):
                    raise ModelValidationError(f"increments[{i}][{j}] is not an increment law")
                if law.dim != self.dimension:
                    raise ModelValidationError(
                        f"increments[{i}][{j}] has dimension {law.dim}, expected {self.dimension}"
                    )
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "increments", incs)
        object.__setattr__(self, "dimension", int(self.dimension))

    @property
    def n_states(self) -> int:
        return self.states.size

    @property
    def d(self) -> int:
        return self.dimension

    def law(self, x: int, y: int) -> IncrementLaw:
        return self.increments[x][y]

    def cell_means(self) -> np.ndarray:
        """Array ``(N, N, d)`` of increment means per transition."""
        if "means" not in self._cache:
            n = self.n_states
            m = np.array([[self.increments[x][y].mean() for y in range(n)] for x in range(n)])
            m.setflags(write=False)
            self._cache["means"] = m
        return self._cache["means"]

    def cell_second_moments(self) -> np.ndarray:
        """Array ``(N, N, d, d)`` of ``E[xi xi^T]`` per transition."""
        if "m2" not in self._cache:
            n = self.n_states
            m = np.array(
                [[self.increments[x][y].second_moment() for y in range(n)] for x in range(n)]
            )
            m.setflags(write=False)
            self._cache["m2"] = m
        return self._cache["m2"]

    def stationary(self) -> np.ndarray:
        if "pi" not in self._cache:
            self._cache["pi"] = stationary_distribution(self.P)
        return self._cache["pi"]

    def with_increments(self, increments, name: str | None = None) -> "MarkovAdditiveProcess":
        return MarkovAdditiveProcess(
            self.states, self.P, increments, self.dimension, name or self.name
        )

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "states": list(self.states.labels),
            "transition": self.P.tolist(),
            "increments": [[law.to_dict() for law in row] for row in self.increments],
        }

    def __eq__(self, other):
        return (
            isinstance(other, MarkovAdditiveProcess)
            and self.states == other.states
            and np.array_equal(self.P, other.P)
            and self.increments == other.increments
            and self.dimension == other.dimension
        )

    def __hash__(self):
        return hash((self.states, self.P.tobytes(), self.increments, self.dimension))


def make_map(P, increments, dimension: int | None = None, labels=(), name="map"):
    P = np.asarray(P, dtype=float)
    if dimension is None:
        dimension = increments[0][0].dim
    return MarkovAdditiveProcess(StateSpace(P.shape[0], tuple(labels)), P, increments, dimension, name)


def is_primitive(P) -> bool:
    """True iff some power ``P^k`` with ``k <= N^2`` is strictly positive."""
    A = (np.asarray(P) > 0).astype(np.int64)
    n = A.shape[0]
    B = A.copy()
    for _ in range(n * n):
        if B.all():
            return True
        B = (B @ A > 0).astype(np.int64)
    return bool(B.all())


def stationary_distribution(P, tol: float = DEFAULT_TOLERANCES.stationary) -> np.ndarray:
    P = np.asarray(P, dtype=float)
    if not is_primitive(P):
        raise NotErgodic("no power P^k (k <= N^2) is strictly positive")
    n = P.shape[0]
    # replace one balance equation by the normalisation constraint
    A = P.T - np.eye(n)
    A[-1, :] = 1.0
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    pi = np.linalg.solve(A, rhs)
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    for _ in range(3):
        if np.max(np.abs(pi @ P - pi)) <= tol:
            break
        pi = pi @ P
        pi /= pi.sum()
    if np.max(np.abs(pi @ P - pi)) > tol:
        raise NotErgodic("stationary vector did not reach the balance tolerance")
    pi.setflags(write=False)
    return pi


def mean_increment(map_: MarkovAdditiveProcess) -> np.ndarray:
    """Stationary one-step drift ``sum_{x,y} pi_x P_xy E[xi_xy]``."""
    pi = map_.stationary()
    return np.einsum("x,xy,xyi->i", pi, map_.P, map_.cell_means())


def is_centered(map_: MarkovAdditiveProcess, tol: float = DEFAULT_TOLERANCES.centering) -> bool:
    return bool(np.max(np.abs(mean_increment(map_))) <= tol)


def center(map_: MarkovAdditiveProcess, tol: float = DEFAULT_TOLERANCES.centering):
    """Shift every increment law by the stationary drift."""
    m = mean_increment(map_)
    if np.max(np.abs(m)) <= tol:
        return map_
    incs = tuple(tuple(law.shifted(-m) for law in row) for row in map_.increments)
    return map_.with_increments(incs)


# --------------------------------------------------------------------------
# simulation


@dataclass(frozen=True)
class TrajectorySample:
    seed: int
    states: np.ndarray  # (n+1,)
    walk: np.ndarray  # (n+1, d)


class _Sampler:
    """Vectorised sampler over a block of trajectories.

    Increment laws are flattened into padded Gaussian-mixture tables so one
    step for ``B`` trajectories costs a handful of gathers.
    """

    def __init__(self, map_: MarkovAdditiveProcess):
        self.map = map_
        n, d = map_.n_states, map_.d
        forms = [[map_.law(x, y).mixture_form() for y in range(n)] for x in range(n)]
        K = max(len(f.weights) for row in forms for f in row)
        self.K = K
        self.weights = np.zeros((n, n, K))
        self.means = np.zeros((n, n, K, d))
        self.factors = np.zeros((n, n, K, d, d))
        for x in range(n):
            for y in range(n):
                f = forms[x][y]
                k = len(f.weights)
                self.weights[x, y, :k] = f.weights
                self.means[x, y, :k] = f.means
                self.factors[x, y, :k] = f.factors
        self.cum_w = np.cumsum(self.weights, axis=-1)
        self.cum_w[..., -1] = np.inf
        self.cum_p = np.cumsum(map_.P, axis=1)
        self.cum_p[:, -1] = np.inf
        self.deterministic = bool(np.all(self.factors == 0.0))
        self.single_state = n == 1
        # flat (x, y, k) tables for cheap gathers
        self.flat_means = self.means.reshape(-1, d)
        self.flat_factors = self.factors.reshape(-1, d, d)
        used = self.weights.reshape(-1) > 0
        F = self.flat_factors[used]
        self.shared_factor = F[0] if np.all(F == F[0]) else None

    def initial_states(self, mu, size: int, rng: np.random.Generator) -> np.ndarray:
        mu = np.asarray(mu, dtype=float)
        if self.single_state:
            return np.zeros(size, dtype=np.intp)
        cum = np.cumsum(mu)
        cum[-1] = np.inf
        return np.searchsorted(cum, rng.random(size), side="right").astype(np.intp)

    def steps(self, x0: np.ndarray, n_steps: int, rng: np.random.Generator):
        """Advance ``n_steps``; return states ``(n_steps, B)`` and increments ``(n_steps, B, d)``."""
        B = x0.size
        d = self.map.d
        states = np.empty((n_steps, B), dtype=np.intp)
        if self.single_state:
            states.fill(0)
            prev = np.zeros((n_steps, B), dtype=np.intp)
        else:
            u = rng.random((n_steps, B))
            x = x0
            cols = self.cum_p.shape[1] - 1
            for k in range(n_steps):
                c = self.cum_p[x]
                if cols <= 8:
                    nxt = (u[k] >= c[:, 0]).astype(np.intp)
                    for j in range(1, cols):
                        nxt += u[k] >= c[:, j]
                    x = nxt
                else:
                    x = (u[k][:, None] >= c).sum(axis=1)
                states[k] = x
            prev = np.empty_like(states)
            prev[0] = x0
            prev[1:] = states[:-1]
        n = self.map.n_states
        cell = prev * n + states
        if self.K > 1:
            v = rng.random((n_steps, B))
            comp = (v[..., None] >= self.cum_w[prev, states]).sum(axis=-1)
            cell = cell * self.K + comp
        inc = np.take(self.flat_means, cell, axis=0)
        if not self.deterministic:
            z = rng.standard_normal((n_steps, B, d))
            if self.shared_factor is not None:
                inc += z @ self.shared_factor.T
            else:
                inc += np.einsum("tbij,tbj->tbi", np.take(self.flat_factors, cell, axis=0), z)
        return states, inc


def sampler(map_: MarkovAdditiveProcess) -> _Sampler:
    if "sampler" not in map_._cache:
        map_._cache["sampler"] = _Sampler(map_)
    return map_._cache["sampler"]


def _check_mu(mu, n: int) -> np.ndarray:
    mu = np.asarray(mu, dtype=float)
    if mu.shape != (n,) or np.any(mu < 0) or abs(mu.sum() - 1.0) > 1e-12:
        raise ModelValidationError("initial distribution must be a probability vector")
    return mu


def simulate(map_: MarkovAdditiveProcess, mu, n_steps: int, seed: int) -> TrajectorySample:
    if n_steps < 0:
        raise ValueError("n_steps must be non-negative")
    mu = _check_mu(mu, map_.n_states)
    s = sampler(map_)
    gen = rng_mod.stream(seed, rng_mod.SIMULATE)
    x0 = s.initial_states(mu, 1, gen)
    walk = np.zeros((n_steps + 1, map_.d))
    states = np.empty(n_steps + 1, dtype=np.intp)
    states[0] = x0[0]
    if n_steps:
        st, inc = s.steps(x0, n_steps, gen)
        states[1:] = st[:, 0]
        walk[1:] = np.cumsum(inc[:, 0, :], axis=0)
    return TrajectorySample(seed, states, walk)


def simulate_endpoints(map_, mu, n_steps: int, n_traj: int, seed: int, block: int = 4096):
    """Sample ``(X_0, X_n, S_n)`` for ``n_traj`` independent trajectories.

    Trajectories are generated in fixed blocks with derived streams, so the
    output is a pure function of the arguments.
    """
    mu = _check_mu(mu, map_.n_states)
    s = sampler(map_)
    x0s, xns, sns = [], [], []
    for b, size in enumerate(rng_mod.block_sizes(n_traj, block)):
        gen = rng_mod.stream(seed, rng_mod.SEMIGROUP_MC, b)
        x0 = s.initial_states(mu, size, gen)
        if n_steps == 0:
            xns.append(x0)
            sns.append(np.zeros((size, map_.d)))
        else:
            st, inc = s.steps(x0, n_steps, gen)
            xns.append(st[-1])
            sns.append(inc.sum(axis=0))
        x0s.append(x0)
    return np.concatenate(x0s), np.concatenate(xns), np.concatenate(sns)


def empirical_transition_counts(states: Sequence[int], n: int) -> np.ndarray:
    states = np.asarray(states)
    counts = np.zeros((n, n), dtype=np.int64)
    np.add.at(counts, (states[:-1], states[1:]), 1)
    return counts
