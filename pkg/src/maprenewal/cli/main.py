"""``maprenewal`` command line entry point.

Exit codes: 0 when every selected check passes (expected failures count as
passes), 1 when a check fails, 2 for configuration errors.

A ``--config`` file may hold any experiment field and/or an inline model
spec.  Values in the file override the corresponding flags; fields absent
from the file keep their flag values.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

import numpy as np
import yaml

from ..config import PROFILES
from ..renewal.records import convergence_csv, dumps_records, fmt
from .config import SUITES, ConfigError, ExperimentConfig, read_config_file
from .suites import run_suites


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="maprenewal", description=__doc__.splitlines()[0])
    src = p.add_argument_group("model")
    src.add_argument("--model", metavar="PATH", help="model spec file (JSON or YAML)")
    src.add_argument("--gallery", metavar="NAME", help="named reference model")
    src.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                     help="gallery parameter (repeatable, VALUE parsed as YAML)")
    p.add_argument("--suite", choices=SUITES, default="spectral")
    p.add_argument("--a-max", type=float, default=20.0, help="largest |a| (shifts 10, 20, ... up to it)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-traj", type=int, default=4096, help="Monte Carlo trajectories")
    p.add_argument("--out", default="results", metavar="DIR")
    p.add_argument("--tol-profile", choices=sorted(PROFILES), default="default")
    p.add_argument("--config", metavar="PATH", help="YAML/JSON experiment file")
    return p


def config_from_args(args) -> ExperimentConfig:
    params = {}
    for item in args.param:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"--param expects KEY=VALUE, got {item!r}")
        params[key] = yaml.safe_load(value)
    fields = dict(gallery=args.gallery, gallery_params=params, model_path=args.model, suite=args.suite,
                  a_max=args.a_max, seed=args.seed, tol_profile=args.tol_profile, n_traj=args.n_traj)
    if args.config:
        file_fields = read_config_file(args.config)
        if "model_data" in file_fields or "model_path" in file_fields:
            fields["gallery"] = None
        if "gallery" in file_fields or "model_data" in file_fields:
            fields["model_path"] = None
        fields.update(file_fields)
    try:
        return ExperimentConfig(**fields)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def emit_plot_data(results, out_dir) -> dict:
    """Write ``ratio_vs_a.csv`` and ``lambda_vs_t.csv``; return their paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for r in results:
        if r.get("route") == "lambda_curve":
            rows += [[r["model_id"], fmt(t), fmt(v)] for t, v in zip(r["norm_t"], r["abs_lambda"])]
    paths = {"ratio_vs_a": out_dir / "ratio_vs_a.csv", "lambda_vs_t": out_dir / "lambda_vs_t.csv"}
    paths["ratio_vs_a"].write_text(convergence_csv(results))
    paths["lambda_vs_t"].write_text(_csv(["model_id", "norm_t", "abs_lambda"], rows))
    return paths


def run(cfg: ExperimentConfig, out_dir) -> int:
    cfg.validate()
    res = run_suites(cfg)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    records = [dict(r) for r in res.records]
    text = dumps_records(records)
    (out / "results.json").write_text(text)
    (out / "convergence.csv").write_text(convergence_csv(records))
    for name, body in res.tables.items():
        (out / name).write_text(body)
    emit_plot_data(records, out)
    lines = [f"model {cfg.model_id}  suite {cfg.suite}  config {cfg.config_hash()}"]
    lines += [f"{o.status:5s}  {o.name}: {o.detail}" for o in res.outcomes]
    (out / "summary.txt").write_text("\n".join(lines) + "\n")
    print("\n".join(lines))
    failed = [o for o in res.outcomes if not o.ok]
    for o in failed:
        print(f"FAIL: {o.name}: {o.detail}", file=sys.stderr)
    return 1 if failed else 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        cfg.validate()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    np.seterr(all="ignore")
    return run(cfg, args.out)
