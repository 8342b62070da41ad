"""Increment laws on R^d with exact characteristic functions.

Three kinds are supported: point masses, Gaussians and finite mixtures of
either.  Every law can be flattened to a Gaussian mixture (a point mass is a
Gaussian with zero covariance), which is the representation the vectorised
samplers work with.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from ..errors import ModelValidationError

_PSD_TOL = 1e-12


def _as_vector(v, name: str) -> np.ndarray:
    arr = np.array(v, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ModelValidationError(f"{name} must be a non-empty 1-d vector")
    if not np.all(np.isfinite(arr)):
        raise ModelValidationError(f"{name} has non-finite entries")
    arr.setflags(write=False)
    return arr


def _psd_factor(cov: np.ndarray) -> np.ndarray:
    """Return ``L`` with ``L @ L.T == cov``; works for singular ``cov``."""
    w, v = np.linalg.eigh(cov)
    return v * np.sqrt(np.clip(w, 0.0, None))


@dataclass(frozen=True)
class GaussianMixtureForm:
    """Flattened representation used by samplers: weights, means, factors."""

    weights: np.ndarray  # (K,)
    means: np.ndarray  # (K, d)
    covs: np.ndarray  # (K, d, d)
    factors: np.ndarray  # (K, d, d)


class IncrementLaw:
    """Common interface.  Subclasses are immutable value objects."""

    dim: int

    def cf(self, t) -> np.ndarray:
        """Characteristic function ``E[exp(i <t, xi>)]``, vectorised over ``t[..., d]``."""
        t = np.asarray(t, dtype=float)
        if t.shape[-1] != self.dim:
            raise ValueError(f"t must have last dimension {self.dim}")
        form = self.mixture_form()
        phase = t @ form.means.T  # (..., K)
        quad = np.einsum("...i,kij,...j->...k", t, form.covs, t)
        out = np.exp(1j * phase - 0.5 * quad) @ form.weights
        # exact value at the origin, independent of weight rounding
        at_zero = np.all(t == 0.0, axis=-1)
        if np.any(at_zero):
            out = np.where(at_zero, 1.0 + 0.0j, out)
        return out

    def mixture_form(self) -> GaussianMixtureForm:
        raise NotImplementedError

    def mean(self) -> np.ndarray:
        f = self.mixture_form()
        return f.weights @ f.means

    def second_moment(self) -> np.ndarray:
        """``E[xi xi^T]``."""
        f = self.mixture_form()
        outer = f.covs + np.einsum("ki,kj->kij", f.means, f.means)
        return np.einsum("k,kij->ij", f.weights, outer)

    def covariance(self) -> np.ndarray:
        m = self.mean()
        return self.second_moment() - np.outer(m, m)

    def axis_skewness(self) -> float:
        """Largest absolute standardised third central moment over the coordinate axes."""
        f = self.mixture_form()
        mu = self.mean()
        dev = f.means - mu
        var_k = np.einsum("kii->ki", f.covs)
        third = f.weights @ (dev**3 + 3.0 * dev * var_k)
        var = np.diag(self.covariance())
        with np.errstate(divide="ignore", invalid="ignore"):
            skew = np.where(var > 0, np.abs(third) / np.maximum(var, 1e-300) ** 1.5, 0.0)
        return float(np.max(skew))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        f = self.mixture_form()
        k = rng.choice(len(f.weights), size=size, p=f.weights)
        z = rng.standard_normal((size, self.dim))
        return f.means[k] + np.einsum("nij,nj->ni", f.factors[k], z)

    def shifted(self, delta) -> "IncrementLaw":
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class PointMass(IncrementLaw):
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "v", _as_vector(self.v, "point mass location"))

    @property
    def dim(self) -> int:
        return self.v.size

    def cf(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if t.shape[-1] != self.dim:
            raise ValueError(f"t must have last dimension {self.dim}")
        return np.exp(1j * (t @ self.v))

    def mixture_form(self) -> GaussianMixtureForm:
        d = self.dim
        zeros = np.zeros((1, d, d))
        return GaussianMixtureForm(np.ones(1), self.v[None, :], zeros, zeros)

    def shifted(self, delta) -> "PointMass":
        return PointMass(self.v + np.asarray(delta, dtype=float))

    def to_dict(self) -> dict:
        return {"kind": "point_mass", "params": {"v": self.v.tolist()}}

    def __eq__(self, other):
        return isinstance(other, PointMass) and np.array_equal(self.v, other.v)

    def __hash__(self):
        return hash(("pm", self.v.tobytes()))


@dataclass(frozen=True)
class Gaussian(IncrementLaw):
    mean_: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        m = _as_vector(self.mean_, "gaussian mean")
        c = np.array(self.cov, dtype=float)
        if c.shape != (m.size, m.size):
            raise ModelValidationError(
                f"gaussian covariance must be {m.size}x{m.size}, got {c.shape}"
            )
        if not np.allclose(c, c.T, atol=_PSD_TOL * max(1.0, np.abs(c).max())):
            raise ModelValidationError("gaussian covariance is not symmetric")
        c = 0.5 * (c + c.T)
        if np.linalg.eigvalsh(c).min() < -_PSD_TOL * max(1.0, np.abs(c).max()):
            raise ModelValidationError("gaussian covariance is not positive semidefinite")
        c.setflags(write=False)
        object.__setattr__(self, "mean_", m)
        object.__setattr__(self, "cov", c)

    @property
    def dim(self) -> int:
        return self.mean_.size

    def cf(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if t.shape[-1] != self.dim:
            raise ValueError(f"t must have last dimension {self.dim}")
        quad = np.einsum("...i,ij,...j->...", t, self.cov, t)
        return np.exp(1j * (t @ self.mean_) - 0.5 * quad)

    def mixture_form(self) -> GaussianMixtureForm:
        return GaussianMixtureForm(
            np.ones(1), self.mean_[None, :], self.cov[None], _psd_factor(self.cov)[None]
        )

    def shifted(self, delta) -> "Gaussian":
        return Gaussian(self.mean_ + np.asarray(delta, dtype=float), self.cov)

    def to_dict(self) -> dict:
        return {
            "kind": "gaussian",
            "params": {"mean": self.mean_.tolist(), "cov": self.cov.tolist()},
        }

    def __eq__(self, other):
        return (
            isinstance(other, Gaussian)
            and np.array_equal(self.mean_, other.mean_)
            and np.array_equal(self.cov, other.cov)
        )

    def __hash__(self):
        return hash(("g", self.mean_.tobytes(), self.cov.tobytes()))


@dataclass(frozen=True)
class FiniteMixture(IncrementLaw):
    weights: np.ndarray
    components: tuple = field(default_factory=tuple)

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        comps = tuple(self.components)
        if w.ndim != 1 or w.size != len(comps) or w.size == 0:
            raise ModelValidationError("mixture needs one weight per component")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ModelValidationError("mixture weights must be non-negative and sum to 1")
        dims = {c.dim for c in comps}
        if len(dims) != 1:
            raise ModelValidationError("mixture components must share a dimension")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "components", comps)

    @property
    def dim(self) -> int:
        return self.components[0].dim

    def mixture_form(self) -> GaussianMixtureForm:
        forms = [c.mixture_form() for c in self.components]
        return GaussianMixtureForm(
            np.concatenate([wi * f.weights for wi, f in zip(self.weights, forms)]),
            np.concatenate([f.means for f in forms]),
            np.concatenate([f.covs for f in forms]),
            np.concatenate([f.factors for f in forms]),
        )

    def shifted(self, delta) -> "FiniteMixture":
        return FiniteMixture(self.weights, tuple(c.shifted(delta) for c in self.components))

    def to_dict(self) -> dict:
        return {
            "kind": "mixture",
            "params": {
                "weights": self.weights.tolist(),
                "components": [c.to_dict() for c in self.components],
            },
        }

    def __eq__(self, other):
        return (
            isinstance(other, FiniteMixture)
            and np.array_equal(self.weights, other.weights)
            and self.components == other.components
        )

    def __hash__(self):
        return hash(("mix", self.weights.tobytes(), self.components))


Law = Union[PointMass, Gaussian, FiniteMixture]


def law_from_dict(spec: dict, where: str = "law") -> IncrementLaw:
    """Build a law from ``{"kind": ..., "params": {...}}``."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ModelValidationError(f"{where}: expected a mapping with a 'kind' field")
    kind = str(spec["kind"]).lower().replace("-", "_")
    params = spec.get("params", {})
    try:
        if kind in ("point_mass", "pointmass", "dirac"):
            return PointMass(params["v"])
        if kind == "gaussian":
            return Gaussian(params["mean"], params["cov"])
        if kind in ("mixture", "finite_mixture"):
            comps = tuple(
                law_from_dict(c, f"{where}.components[{i}]")
                for i, c in enumerate(params["components"])
            )
            return FiniteMixture(params["weights"], comps)
    except KeyError as exc:
        raise ModelValidationError(f"{where}: missing parameter {exc.args[0]!r}") from None
    except ModelValidationError as exc:
        raise ModelValidationError(f"{where}: {exc}") from None
    raise ModelValidationError(f"{where}: unknown law kind {spec['kind']!r}")


def isotropic_gaussian(d: int, var: float = 1.0, mean: Sequence[float] | None = None) -> Gaussian:
    m = np.zeros(d) if mean is None else np.asarray(mean, dtype=float)
    return Gaussian(m, var * np.eye(d))
