"""Model-spec files.

A model spec is a JSON or YAML mapping::

    dimension: 3                      # d >= 3
    states: [a, b]                    # labels, or an integer count
    transition:                       # row-major N x N, rows sum to 1
      - [0.9, 0.1]
      - [0.2, 0.8]
    increments:                       # N x N grid of {kind, params}
      - - {kind: gaussian, params: {mean: [1, 0, 0], cov: [[1,0,0],[0,1,0],[0,0,1]]}}
        - {kind: point_mass, params: {v: [0, 0, 0]}}
      - - ...
    initial: stationary               # or a probability vector

``increments`` may also be a single ``{kind, params}`` mapping, which is then
used for every transition.  Law kinds are ``point_mass`` (``v``),
``gaussian`` (``mean``, ``cov``) and ``mixture`` (``weights``,
``components``).  :func:`load_model` checks every invariant and reports the
first violation together with its row/column coordinates.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import yaml

from ..errors import ModelValidationError
from .laws import law_from_dict
from .process import MarkovAdditiveProcess, StateSpace, stationary_distribution, validate_transition_matrix


def _read(path) -> dict:
    text = Path(path).read_text()
    if str(path).endswith(".json"):
        data = json.loads(text)
    else:
        data = yaml.safe_load(text)
    if not isinstance(data, dict):
        raise ModelValidationError("model spec must be a mapping")
    return data


def model_from_dict(data: dict, name: str = "model") -> tuple[MarkovAdditiveProcess, np.ndarray]:
    """Return ``(map, mu)``; ``mu`` is the stationary law when ``initial`` is omitted."""
    for key in ("dimension", "transition", "increments"):
        if key not in data:
            raise ModelValidationError(f"model spec is missing field {key!r}")
    d = data["dimension"]
    if not isinstance(d, int) or d < 3:
        raise ModelValidationError(f"dimension must be an integer >= 3, got {d!r}")
    P = validate_transition_matrix(data["transition"])
    n = P.shape[0]
    states = data.get("states", n)
    space = StateSpace(states, ()) if isinstance(states, int) else StateSpace(len(states), tuple(states))
    if space.size != n:
        raise ModelValidationError(f"{space.size} states declared but transition is {n}x{n}")
    raw = data["increments"]
    if isinstance(raw, dict):
        law = law_from_dict(raw, "increments")
        grid = [[law] * n for _ in range(n)]
    else:
        if not isinstance(raw, list) or len(raw) != n:
            raise ModelValidationError(f"increments must have {n} rows")
        grid = []
        for i, row in enumerate(raw):
            if not isinstance(row, list) or len(row) != n:
                raise ModelValidationError(f"increments row {i} must have {n} entries")
            grid.append([law_from_dict(cell, f"increments[{i}][{j}]") for j, cell in enumerate(row)])
    for i, row in enumerate(grid):
        for j, law in enumerate(row):
            if law.dim != d:
                raise ModelValidationError(
                    f"increments[{i}][{j}] has dimension {law.dim}, expected {d}"
                )
    model = MarkovAdditiveProcess(space, P, grid, d, name=data.get("name", name))
    initial = data.get("initial", "stationary")
    if isinstance(initial, str):
        if initial != "stationary":
            raise ModelValidationError(f"initial must be 'stationary' or a vector, got {initial!r}")
        mu = stationary_distribution(P)
    else:
        mu = np.asarray(initial, dtype=float)
        if mu.shape != (n,):
            raise ModelValidationError(f"initial must have {n} entries")
        for i, v in enumerate(mu):
            if not np.isfinite(v) or v < 0:
                raise ModelValidationError(f"initial[{i}] = {v!r} is not a probability")
        if abs(mu.sum() - 1.0) > 1e-12:
            raise ModelValidationError(f"initial sums to {mu.sum()!r}, not 1")
    return model, mu


def load_model(path) -> tuple[MarkovAdditiveProcess, np.ndarray]:
    return model_from_dict(_read(path), name=Path(path).stem)


def dump_model(model: MarkovAdditiveProcess, path, initial="stationary") -> None:
    data = model.to_dict()
    data["initial"] = initial if isinstance(initial, str) else list(map(float, initial))
    Path(path).write_text(json.dumps(data, indent=2))
