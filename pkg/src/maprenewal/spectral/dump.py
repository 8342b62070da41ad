"""CSV dump of ``lambda(t)`` on a grid."""

from __future__ import annotations

import csv
import io

import numpy as np

from ..config import DEFAULT_TOLERANCES
from ..errors import MapRenewalError
from .decomposition import eigenprojection


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def lambda_grid_rows(map_, ts, tol=DEFAULT_TOLERANCES) -> list[list[str]]:
    """One row per ``t``: ``t_1..t_d, re, im, abs, residual``.

    Points where the projector fails are written with ``nan`` values.
    """
    rows = []
    for t in np.atleast_2d(np.asarray(ts, dtype=float)):
        try:
            dec = eigenprojection(map_, t, tol=tol)
            vals = [dec.lam.real, dec.lam.imag, abs(dec.lam), dec.residual]
        except MapRenewalError:
            vals = [np.nan] * 4
        rows.append([fmt(v) for v in t] + [fmt(v) for v in vals])
    return rows


def lambda_grid_csv(map_, ts, tol=DEFAULT_TOLERANCES) -> str:
    d = map_.d
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"t{i + 1}" for i in range(d)] + ["re_lambda", "im_lambda", "abs_lambda", "residual"])
    w.writerows(lambda_grid_rows(map_, ts, tol))
    return buf.getvalue()
