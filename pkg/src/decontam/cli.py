"""Command-line harness.

Subcommands::

    decontam track --config run.cfg --out results/ [--strategy fixed --gamma 0.025]
    decontam synth --script scenario.txt --seed 3 --out data/seq3
    decontam qp --losses 0,1 --priors 0.5,0.5 --mu 1
    decontam sweep --config run.cfg --values 1e-8,1,5 --out sweep/

Exit codes: 0 success, 2 configuration or number errors, 3 data ingestion or
write errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig, format_run_config, load_run_config
from .eval import ReportError, export_report
from .tracking import (IngestionError, ScriptError, generate_sequence, load_script,
                       load_sequence, track, write_sequence)
from .weights import AlphaSubproblem, WeightsError, kkt_residual, solve_alpha

EXIT_OK, EXIT_CONFIG, EXIT_DATA = 0, 2, 3

SWEEP_PARAMS = {"mu": "joint.mu", "gamma": "strategy.gamma", "eta": "joint.eta",
                "psr_threshold": "psr.threshold", "lam": "joint.lam"}


class DataError(Exception):
    pass


def _overrides(args) -> dict:
    out = {}
    for flag, key in (("seed", "run.seed"), ("reps", "run.reps"), ("strategy", "strategy.kind"),
                      ("mu", "joint.mu"), ("gamma", "strategy.gamma"),
                      ("psr_threshold", "psr.threshold"), ("format", "run.format")):
        v = getattr(args, flag, None)
        if v is not None:
            out[key] = str(v)
    for item in getattr(args, "set", None) or []:
        if "=" not in item:
            raise ConfigError(item, "--set expects key=value")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _load_source(cfg: RunConfig, seed: int):
    try:
        if cfg.synthetic is not None:
            return generate_sequence(load_script(cfg.synthetic), seed)
        return load_sequence(cfg.sequence)
    except ScriptError as exc:
        raise ConfigError(f"source.synthetic ({exc.key})", str(exc)) from None
    except OSError as exc:
        raise DataError(f"cannot read {cfg.synthetic}: {exc}") from None
    except IngestionError as exc:
        raise DataError(str(exc)) from None


def run_reps(cfg: RunConfig, out: Path | None = None):
    """Track every repetition (seed + rep index); returns a list of metrics dicts."""
    rows = []
    static = None
    for rep in range(cfg.reps):
        seed = cfg.seed + rep
        if cfg.sequence is not None:
            static = static or _load_source(cfg, seed)
            seq = static
        else:
            seq = _load_source(cfg, seed)
        report = track(seq, cfg.tracker, seed)
        m = dict(report.metrics(), rep=rep, seed=seed)
        rows.append(m)
        if out is not None:
            run_dir = out / f"rep_{rep:03d}"
            try:
                if cfg.format == "json":
                    run_dir.mkdir(parents=True, exist_ok=True)
                    export_report(report, "json", run_dir / "report.json")
                else:
                    export_report(report, "csv", run_dir)
                (run_dir / "metrics.json").write_text(json.dumps(m, indent=1))
            except (OSError, ReportError) as exc:
                raise DataError(str(exc)) from None
    return rows


def aggregate(rows) -> dict:
    op = np.array([r["op_50"] for r in rows])
    au = np.array([r["auc"] for r in rows])
    return {"reps": len(rows), "seed": rows[0]["seed"],
            "op_50_median": float(np.median(op)), "op_50_mean": float(op.mean()),
            "auc_median": float(np.median(au)), "auc_mean": float(au.mean())}


def _write(path: Path, text: str):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from None


def cmd_track(args) -> int:
    cfg = load_run_config(args.config, _overrides(args))
    out = Path(args.out)
    _write(out / "config.txt", format_run_config(cfg))
    rows = run_reps(cfg, out)
    agg = aggregate(rows)
    _write(out / "aggregate.json", json.dumps(agg, indent=1))
    print(f"op_50 median {agg['op_50_median']:.2f} mean {agg['op_50_mean']:.2f}  "
          f"auc median {agg['auc_median']:.2f} mean {agg['auc_mean']:.2f}  ({agg['reps']} runs)")
    return EXIT_OK


def cmd_synth(args) -> int:
    try:
        script = load_script(args.script)
    except ScriptError as exc:
        raise ConfigError(exc.key, str(exc)) from None
    except OSError as exc:
        raise DataError(f"cannot read {args.script}: {exc}") from None
    seq = generate_sequence(script, args.seed)
    try:
        write_sequence(seq, args.out)
    except OSError as exc:
        raise DataError(f"cannot write {args.out}: {exc}") from None
    print(f"wrote {len(seq)} frames to {args.out}")
    return EXIT_OK


def _numbers(key, text):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(key, str(exc)) from None
    if not vals:
        raise ConfigError(key, "no numbers given")
    return vals


def cmd_qp(args) -> int:
    losses = _numbers("--losses", args.losses)
    priors = _numbers("--priors", args.priors)
    mu = _numbers("--mu", args.mu)
    if len(mu) != 1:
        raise ConfigError("--mu", "expected a single value")
    try:
        problem = AlphaSubproblem(losses, priors, mu[0])
    except WeightsError as exc:
        raise ConfigError("qp", str(exc)) from None
    alpha = solve_alpha(problem)
    print("alpha: " + " ".join(f"{a:.12g}" for a in alpha))
    print(f"kkt_residual: {kkt_residual(problem, alpha):.3e}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    key = SWEEP_PARAMS.get(args.param)
    if key is None:
        raise ConfigError("--param", f"must be one of {sorted(SWEEP_PARAMS)}")
    values = _numbers("--values", args.values)
    base = _overrides(args)
    out = Path(args.out)
    table = []
    for v in values:
        cfg = load_run_config(args.config, dict(base, **{key: repr(v)}))
        rows = run_reps(cfg, out / f"{args.param}_{v!r}" if args.keep_runs else None)
        table.append(dict({args.param: v}, **aggregate(rows)))
    fields = [args.param, "seed", "reps", "op_50_median", "op_50_mean", "auc_median", "auc_mean"]
    try:
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "sweep.csv", "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=fields)
            w.writeheader()
            w.writerows(table)
    except OSError as exc:
        raise DataError(f"cannot write {out / 'sweep.csv'}: {exc}") from None
    for row in table:
        print(f"{args.param}={row[args.param]!r}: op_50 median {row['op_50_median']:.2f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="decontam", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def run_flags(sp):
        sp.add_argument("--config", required=True)
        sp.add_argument("--out", required=True)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--reps", type=int)
        sp.add_argument("--strategy", choices=("joint", "fixed", "psr"))
        sp.add_argument("--mu")
        sp.add_argument("--gamma")
        sp.add_argument("--psr-threshold", dest="psr_threshold")
        sp.add_argument("--format", choices=("csv", "json"))
        sp.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override any config key (repeatable)")

    sp = sub.add_parser("track", help="run the tracker and write reports")
    run_flags(sp)
    sp.set_defaults(func=cmd_track)

    sp = sub.add_parser("synth", help="materialize a synthetic sequence")
    sp.add_argument("--script", required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("qp", help="solve one frame-weight problem")
    sp.add_argument("--losses", required=True)
    sp.add_argument("--priors", required=True)
    sp.add_argument("--mu", required=True)
    sp.set_defaults(func=cmd_qp)

    sp = sub.add_parser("sweep", help="aggregate metrics over parameter values")
    run_flags(sp)
    sp.add_argument("--param", default="mu")
    sp.add_argument("--values", required=True)
    sp.add_argument("--keep-runs", action="store_true", dest="keep_runs")
    sp.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
