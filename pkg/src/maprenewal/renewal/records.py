"""JSON records and CSV convergence tables.

Floats are written with 17 significant digits so that a re-run with the same
inputs produces byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from .. import __version__
from .estimate import RenewalEstimate

CONVERGENCE_COLUMNS = ("norm_a", "mc", "fourier", "asymptote", "ratio_mc", "ratio_fourier")


def fmt(x) -> str:
    if x is None:
        return ""
    return format(float(x), ".17g")


def _clean(obj):
    """Make ``obj`` JSON-serialisable with deterministic float text."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return repr(x)
        return float(fmt(x))
    if isinstance(obj, complex):
        return {"re": _clean(obj.real), "im": _clean(obj.imag)}
    return obj


def estimate_record(est: RenewalEstimate, model_id: str, config_hash: str) -> dict:
    comps = {k: est.components[k] for k in ("I1", "I2", "I3", "J", "K") if k in est.components}
    return {
        "model_id": model_id,
        "route": est.route,
        "a": list(est.a),
        "value": est.value,
        "error": est.error,
        "stderr": est.stderr,
        "tail_bound": est.tail_bound,
        "quadrature_error": est.quadrature_error,
        "n_max": est.n_max,
        "n_traj": est.n_traj,
        "components": comps,
        "config_hash": config_hash,
        "version": __version__,
    }


def dumps_records(records) -> str:
    return json.dumps(_clean(list(records)), indent=2, sort_keys=True) + "\n"


def convergence_rows(records) -> list[dict]:
    """Group renewal records by ``|a|`` into one row per shift.

    Records need ``route`` in ``{"mc", "fourier"}``, the shift ``a`` and,
    optionally, an ``asymptote`` field.
    """
    rows: dict[float, dict] = {}
    for r in records:
        if r.get("route") not in ("mc", "fourier") or not r.get("a"):
            continue
        na = float(np.linalg.norm(r["a"]))
        row = rows.setdefault(na, {"norm_a": na})
        row[r["route"]] = r["value"]
        if r.get("asymptote") is not None:
            row["asymptote"] = r["asymptote"]
    out = []
    for na in sorted(rows):
        row = rows[na]
        asy = row.get("asymptote")
        for route in ("mc", "fourier"):
            v = row.get(route)
            row[f"ratio_{route}"] = v / asy if (v is not None and asy) else None
        out.append(row)
    return out


def convergence_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CONVERGENCE_COLUMNS)
    for row in convergence_rows(records):
        w.writerow([fmt(row.get(c)) for c in CONVERGENCE_COLUMNS])
    return buf.getvalue()
