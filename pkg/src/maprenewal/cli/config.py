"""Experiment configuration: flags and config file merged, validated and hashed."""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from ..config import PROFILES, get_profile
from ..errors import ModelValidationError, UnknownModel
from ..markov_model import ContinuousARModel, MarkovAdditiveProcess, gallery, load_model, model_from_dict

SUITES = ("spectral", "renewal", "appendix", "all")
MODEL_KEYS = ("dimension", "states", "transition", "increments", "initial", "name")


class ConfigError(ValueError):
    """Invalid experiment configuration (exit code 2)."""


@dataclass
class ExperimentConfig:
    """Everything a run depends on, except the output directory.

    Defaults are chosen so that a renewal run on a 3-state model finishes in
    about a minute; acceptance-grade settings raise ``a_max`` and ``n_traj``.
    """

    gallery: str | None = None
    gallery_params: dict = field(default_factory=dict)
    model_path: str | None = None
    model_data: dict | None = None
    suite: str = "spectral"
    a_max: float = 20.0
    a_sequence: tuple | None = None
    direction: tuple | None = None
    seed: int = 0
    tol_profile: str = "default"
    n_traj: int = 4096
    n_factor: float = 10.0
    h_b: float = 2.0
    h_p: int = 6
    cubature_rtol: float = 1e-7
    cubature_max_level: int = 3
    cubature_budget: int = 3_000_000
    spectral_points: int = 20
    lambda_points: int = 50
    expect: str | None = None

    # resolved by validate()
    model: object = field(default=None, repr=False, compare=False)
    mu: object = field(default=None, repr=False, compare=False)

    @property
    def model_id(self) -> str:
        if self.gallery:
            return self.gallery.lower().replace("-", "_")
        if self.model_path:
            return Path(self.model_path).stem
        return str((self.model_data or {}).get("name", "inline"))

    @property
    def tolerances(self):
        return get_profile(self.tol_profile)

    @property
    def shifts(self) -> list[float]:
        if self.a_sequence is not None:
            return [float(a) for a in self.a_sequence]
        n = max(1, int(math.floor(self.a_max / 10.0 + 1e-9)))
        seq = [10.0 * (k + 1) for k in range(n)]
        if self.a_max < 10.0:
            seq = [float(self.a_max)]
        elif abs(seq[-1] - self.a_max) > 1e-9:
            seq.append(float(self.a_max))
        return seq

    @property
    def expected(self) -> str:
        if self.expect:
            return self.expect
        return "lattice" if self.model_id == "lattice_negative_control" else "pass"

    def validate(self) -> "ExperimentConfig":
        """Check every field and resolve the model; raise :class:`ConfigError`."""
        sources = [s for s in (self.gallery, self.model_path, self.model_data) if s]
        if len(sources) != 1:
            raise ConfigError("give exactly one of --gallery, --model or an inline model in --config")
        if self.suite not in SUITES:
            raise ConfigError(f"suite must be one of {SUITES}, got {self.suite!r}")
        if self.tol_profile not in PROFILES:
            raise ConfigError(f"tol profile must be one of {sorted(PROFILES)}, got {self.tol_profile!r}")
        if not (isinstance(self.seed, int) and self.seed >= 0):
            raise ConfigError(f"seed must be a non-negative integer, got {self.seed!r}")
        if not (self.a_max > 0 and math.isfinite(self.a_max)):
            raise ConfigError(f"a_max must be positive, got {self.a_max!r}")
        if self.a_sequence is not None:
            seq = list(self.a_sequence)
            if not seq or any(not (float(a) > 0) for a in seq) or sorted(seq) != seq:
                raise ConfigError("a_sequence must be a non-empty increasing list of positive numbers")
        if self.n_traj < 2 or self.n_factor <= 0:
            raise ConfigError("n_traj must be >= 2 and n_factor positive")
        if self.cubature_rtol <= 0 or self.cubature_max_level < 1 or self.cubature_budget < 1:
            raise ConfigError("cubature settings must be positive (max_level >= 1)")
        if self.expect not in (None, "pass", "lattice"):
            raise ConfigError(f"expect must be 'pass' or 'lattice', got {self.expect!r}")
        try:
            if self.gallery:
                model = gallery(self.gallery, **self.gallery_params)
                mu = model.stationary() if isinstance(model, MarkovAdditiveProcess) else None
            elif self.model_path:
                if not Path(self.model_path).is_file():
                    raise ConfigError(f"model file {self.model_path!r} not found")
                model, mu = load_model(self.model_path)
            else:
                model, mu = model_from_dict(self.model_data, name="inline")
        except ModelValidationError as exc:
            raise ConfigError(f"invalid model: {exc}") from None
        except UnknownModel as exc:
            raise ConfigError(str(exc.args[0])) from None
        except TypeError as exc:
            raise ConfigError(f"bad gallery parameters: {exc}") from None
        d = model.d
        if self.direction is not None:
            u = np.asarray(self.direction, dtype=float)
            if u.shape != (d,) or not np.linalg.norm(u) > 0:
                raise ConfigError(f"direction must be a non-zero vector of length {d}")
        if self.h_b <= 0 or int(self.h_p) != self.h_p or self.h_p < d - 1:
            raise ConfigError(f"h needs b > 0 and integer p >= d - 1 = {d - 1}")
        self.model, self.mu = model, mu
        return self

    def unit_direction(self) -> np.ndarray:
        d = self.model.d
        u = np.ones(d) if self.direction is None else np.asarray(self.direction, dtype=float)
        return u / np.linalg.norm(u)

    def resolved(self) -> dict:
        """Canonical description of the run, the input of :meth:`config_hash`."""
        out = {f.name: getattr(self, f.name) for f in dataclasses.fields(self)
               if f.name not in ("model", "mu", "model_data", "model_path")}
        out["a_sequence"] = self.shifts
        out["tolerances"] = self.tolerances.as_dict()
        m = self.model
        if isinstance(m, ContinuousARModel):
            out["model"] = {"A": m.A.tolist(), "noise": m.noise.to_dict()}
        elif m is not None:
            out["model"] = m.to_dict()
            out["initial"] = np.asarray(self.mu).tolist()
        return out

    def config_hash(self) -> str:
        text = json.dumps(self.resolved(), sort_keys=True, default=str)
        return hashlib.sha256(text.encode()).hexdigest()[:16]


_FILE_KEYS = {
    "gallery": "gallery", "gallery_params": "gallery_params", "model": "model_path",
    "suite": "suite", "a_max": "a_max", "a_sequence": "a_sequence", "direction": "direction",
    "seed": "seed", "tol_profile": "tol_profile", "n_traj": "n_traj", "n_factor": "n_factor",
    "spectral_points": "spectral_points", "lambda_points": "lambda_points", "expect": "expect",
}


def read_config_file(path) -> dict:
    """Parse a YAML/JSON config file into :class:`ExperimentConfig` field values.

    Model-spec keys (``dimension``, ``transition``, ...) form an inline model;
    ``h: {b, p}`` and ``cubature: {rtol, max_level, budget}`` are nested.
    """
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file {str(path)!r} not found")
    try:
        data = yaml.safe_load(p.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {str(path)!r}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config file must contain a mapping")
    out: dict = {}
    model = {k: data[k] for k in MODEL_KEYS if k in data}
    if model:
        out["model_data"] = model
    for key, value in data.items():
        if key in MODEL_KEYS:
            continue
        if key in _FILE_KEYS:
            out[_FILE_KEYS[key]] = tuple(value) if key in ("a_sequence", "direction") else value
        elif key == "h":
            out.update({f"h_{k}": v for k, v in dict(value).items() if k in ("b", "p")})
        elif key == "cubature":
            out.update({f"cubature_{k}": v for k, v in dict(value).items()
                        if k in ("rtol", "max_level", "budget")})
        else:
            raise ConfigError(f"unknown config key {key!r}")
    return out
