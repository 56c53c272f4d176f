"""Command-line entry point.

Subcommands: run | grid | verify | bench | reproduce-fig2.  Configuration is a
flat JSON document plus ``--set key=value,...`` overrides (flags win over the
file, the file wins over defaults).  Unknown keys anywhere are a hard error.
Every run writes the fully resolved config next to its outputs.

Exit codes: 0 success, 1 run/verification failure, 2 usage or config error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import replace

import numpy as np

from . import kernels
from .harness import (BenchResult, ExperimentConfig, bench_step_time, cell_id,
                      config_echo, grid_keys_for, mean_curve, reproduce_fig2,
                      run_grid, run_single, write_json, write_run)
from .optimizers import (ConeConfig, MEMORIES, OPT_CONMEZO, OPT_MEZO,
                         OPTIMIZERS, WARMUPS)
from .sampling import DISTS
from .analysis import run_checks

ENV_OUTPUT_DIR = "CONEZO_OUTPUT_DIR"


class ConfigError(Exception):
    pass


def _parse_bool(v: str) -> bool:
    if v.lower() in ("1", "true", "yes", "on"):
        return True
    if v.lower() in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {v!r}")


#: key -> (parser from string, default) for the flat experiment config.
CONFIG_KEYS: dict = {
    "problem": (str, "quadratic:d=1000"),
    "optimizer": (str, OPT_CONMEZO),
    "theta": (float, 1.35),
    "beta": (float, 0.99),
    "eta": (float, 1e-3),
    "lambda": (float, 1e-3),
    "steps": (int, 10_000),
    "dist": (str, "sphere"),
    "warmup": (str, "none"),
    "memory": (str, "buffered"),
    "seeds": (None, [0]),          # list-valued: config file or --seed-list only
    "log_every": (int, 100),
    "output_dir": (str, None),
    "name": (str, None),
    "grad_diagnostics": (_parse_bool, False),
    "grid_eta": (None, None),      # list-valued: config file or --grid-eta only
    "grid_beta": (None, None),
    "grid_theta": (None, None),
}


def load_config_file(path: str) -> dict:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        raise ConfigError(f"cannot read config {path}: {err}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must be a flat JSON object")
    for key in raw:
        if key not in CONFIG_KEYS:
            raise ConfigError(f"unknown config key {key!r} in {path}")
    return raw


def parse_overrides(spec: str) -> dict:
    out: dict = {}
    for item in filter(None, (s.strip() for s in spec.split(","))):
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"override {item!r} is not key=value")
        key = key.strip()
        if key not in CONFIG_KEYS:
            raise ConfigError(f"unknown override key {key!r}")
        conv = CONFIG_KEYS[key][0]
        if conv is None:
            raise ConfigError(f"{key!r} is list-valued; set it in the config file "
                              f"or with its dedicated flag")
        try:
            out[key] = conv(value.strip())
        except (ValueError, ConfigError) as err:
            raise ConfigError(f"bad value for {key!r}: {err}") from None
    return out


def resolve_config(args) -> dict:
    resolved = {k: default for k, (_, default) in CONFIG_KEYS.items()}
    if getattr(args, "config", None):
        resolved.update(load_config_file(args.config))
    if getattr(args, "set", None):
        resolved.update(parse_overrides(args.set))
    for key in ("problem", "optimizer", "steps", "log_every", "output_dir"):
        flag = getattr(args, key, None)
        if flag is not None:
            resolved[key] = flag
    if getattr(args, "seed_list", None):
        resolved["seeds"] = [int(s) for s in args.seed_list.split(",")]
    for gkey in ("grid_eta", "grid_beta", "grid_theta"):
        flag = getattr(args, gkey, None)
        if flag is not None:
            resolved[gkey] = [float(v) for v in flag.split(",")]
    if resolved["output_dir"] is None:
        resolved["output_dir"] = os.environ.get(ENV_OUTPUT_DIR, "conezo-out")
    return resolved


def experiment_from(resolved: dict, default_name: str) -> ExperimentConfig:
    cone = ConeConfig(
        theta=resolved["theta"], beta_final=resolved["beta"], eta=resolved["eta"],
        lam=resolved["lambda"], total_steps=resolved["steps"], dist=resolved["dist"],
        warmup=resolved["warmup"], memory=resolved["memory"],
    )
    name = resolved["name"] or default_name
    cfg = ExperimentConfig(
        problem=resolved["problem"], optimizer=resolved["optimizer"], cone=cone,
        seeds=list(resolved["seeds"]), log_every=resolved["log_every"],
        output_dir=resolved["output_dir"], name=name,
        grad_diagnostics=resolved["grad_diagnostics"],
    )
    try:
        cfg.validate()
    except ValueError as err:
        raise ConfigError(str(err)) from None
    return cfg


def _sanitize(text: str) -> str:
    return "".join(c if c.isalnum() or c in "-._" else "-" for c in text)


def cmd_run(args) -> int:
    resolved = resolve_config(args)
    cfg = experiment_from(resolved, f"run-{_sanitize(resolved['optimizer'])}-"
                                    f"{_sanitize(resolved['problem'])}")
    base = os.path.join(cfg.output_dir, cfg.name)
    write_json(os.path.join(base, "config.json"), config_echo(cfg))
    params = {k: resolved[{"eta": "eta", "beta": "beta", "theta": "theta"}[k]]
              for k in grid_keys_for(cfg.optimizer)}
    cid = cell_id(params)
    summaries = {}
    for seed in cfg.seeds:
        result = run_single(cfg, seed)
        cell_dir = os.path.join(base, cid)
        write_run(cell_dir, seed, result)
        summaries[seed] = result.summary
        status = "DIVERGED" if result.summary.diverged else "ok"
        print(f"seed {seed}: final objective {result.summary.final_objective:.6g} "
              f"({status}, {result.summary.evals} evals)")
    write_json(os.path.join(base, cid, "summary.json"), {
        "params": params,
        "per_seed": {str(s): summaries[s].as_json() for s in summaries},
        "mean_final": float(np.mean([summaries[s].final_objective for s in summaries])),
    })
    if any(s.diverged for s in summaries.values()):
        return 1
    return 0


def cmd_grid(args) -> int:
    resolved = resolve_config(args)
    cfg = experiment_from(resolved, f"grid-{_sanitize(resolved['optimizer'])}-"
                                    f"{_sanitize(resolved['problem'])}")
    grid = {}
    for key, gkey in (("eta", "grid_eta"), ("beta", "grid_beta"), ("theta", "grid_theta")):
        if resolved[gkey]:
            grid[key] = [float(v) for v in resolved[gkey]]
    if not grid:
        raise ConfigError("grid needs at least one of grid_eta/grid_beta/grid_theta")
    report = run_grid(cfg, grid, workers=args.workers)
    best = next(c for c in report.cells if c.selected)
    print(f"cells: {len(report.cells)}; selected {best.cell_id} "
          f"(mean final objective {best.mean_final:.6g})")
    return 0


def cmd_verify(args) -> int:
    records = run_checks(module=args.module, grid=args.grid, seed=args.seed)
    for rec in records:
        status = "PASS" if rec.passed else "FAIL"
        z = f" z={rec.z_score:.2f}" if rec.z_score is not None else ""
        n = f" n={rec.n}" if rec.n else ""
        print(f"{status} {rec.name}{z}{n}: {rec.detail}")
    if args.report:
        write_json(args.report, {"checks": [r.as_json() for r in records]})
    failed = [r for r in records if not r.passed]
    print(f"{len(records) - len(failed)}/{len(records)} checks passed")
    return 1 if failed else 0


def _bench_once(args, memory: str, optimizer: str) -> BenchResult:
    res = bench_step_time(optimizer, args.d, memory, args.steps, dist=args.dist)
    print(f"{optimizer} [{memory}, {res.kernels} kernels] d={args.d}: "
          f"median {res.median_ns / 1e6:.3f} ms/step over {args.steps} steps")
    return res


def cmd_bench(args) -> int:
    names = kernels.available() if args.kernels == "both" else [args.kernels]
    if args.kernels == "active":
        names = [kernels.active().BACKEND]
    results = []
    previous = kernels.active().BACKEND
    try:
        for name in names:
            kernels.use(name)
            if args.compare:
                fast = _bench_once(args, "buffered", OPT_CONMEZO)
                slow = _bench_once(args, "seed_replay", OPT_MEZO)
                ordering = "faster" if fast.median_ns < slow.median_ns else "NOT faster"
                print(f"buffered cone step is {ordering} than seed-replay baseline "
                      f"({fast.median_ns / slow.median_ns:.2f}x the time)")
                results.extend([fast, slow])
            else:
                results.append(_bench_once(args, args.memory, args.optimizer))
    finally:
        kernels.use(previous)
    if args.report:
        write_json(args.report, {"benches": [r.as_json() for r in results]})
    return 0


def cmd_fig2(args) -> int:
    seeds = ([int(s) for s in args.seed_list.split(",")] if args.seed_list
             else list(range(args.seeds)))
    out = reproduce_fig2(output_dir=args.output_dir or
                         os.environ.get(ENV_OUTPUT_DIR, "conezo-out"),
                         seeds=seeds, tuning_steps=args.tuning_steps,
                         final_steps=args.final_steps, workers=args.workers,
                         log_every=args.log_every)
    sp = out["speedup"]
    print(f"selected cells: {out['selected']}")
    print(f"mean final objectives: {out['mean_final']}")
    if sp["reached"]:
        print(f"speedup: {sp['ratio']:.3f}x (target {sp['target']:.6g} reached at "
              f"step {sp['crossing_step']} of {sp['baseline_steps']})")
        return 0
    print("speedup: target never reached")
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conezo",
        description="Zeroth-order optimization runs, grids, verification and timing.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_parser(name, **kw):
        return sub.add_parser(name, formatter_class=argparse.ArgumentDefaultsHelpFormatter, **kw)

    def add_common(p):
        p.add_argument("--config", help="flat JSON config file")
        p.add_argument("--set", help="comma-separated key=value overrides "
                                     f"(keys: {', '.join(sorted(CONFIG_KEYS))})")
        p.add_argument("--problem", help="problem spec, e.g. quadratic:d=1000 "
                                         "(default quadratic:d=1000)")
        p.add_argument("--optimizer", choices=OPTIMIZERS,
                       help="optimizer (default conmezo)")
        p.add_argument("--steps", type=int, help="steps per run (default 10000)")
        p.add_argument("--log-every", type=int, dest="log_every",
                       help="trajectory row cadence (default 100)")
        p.add_argument("--seed-list", help="comma-separated seeds (default 0)")
        p.add_argument("--output-dir", dest="output_dir",
                       help=f"output directory (default ${ENV_OUTPUT_DIR} or conezo-out)")
        p.add_argument("--workers", type=int, default=1,
                       help="parallel worker processes (default 1)")

    p_run = add_parser("run", help="single configuration over one or more seeds")
    add_common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_grid = add_parser("grid", help="hyperparameter grid over seeds")
    add_common(p_grid)
    p_grid.add_argument("--grid-eta", dest="grid_eta", help="comma-separated eta values")
    p_grid.add_argument("--grid-beta", dest="grid_beta", help="comma-separated beta values")
    p_grid.add_argument("--grid-theta", dest="grid_theta", help="comma-separated theta values")
    p_grid.set_defaults(func=cmd_grid)

    p_ver = add_parser("verify", help="moment/concentration/descent verification suite")
    p_ver.add_argument("--module", default="all",
                       choices=["all", "estimator", "sampling", "analysis"])
    p_ver.add_argument("--grid", default="full", choices=["small", "full"],
                       help="check sizes (small is a quick smoke pass)")
    p_ver.add_argument("--seed", type=int, default=2024)
    p_ver.add_argument("--report", help="write the machine-readable report here")
    p_ver.set_defaults(func=cmd_verify)

    p_bench = add_parser("bench", help="median per-step wall time on a constant objective")
    p_bench.add_argument("--optimizer", choices=OPTIMIZERS, default=OPT_CONMEZO)
    p_bench.add_argument("--memory", choices=MEMORIES, default="buffered")
    p_bench.add_argument("--d", type=int, default=10_000_000)
    p_bench.add_argument("--steps", type=int, default=200)
    p_bench.add_argument("--dist", choices=DISTS, default="gaussian")
    p_bench.add_argument("--kernels", default="active",
                         choices=["active", "both", "python", "ext"],
                         help="kernel backend(s) to time")
    p_bench.add_argument("--compare", action="store_true",
                         help="time buffered cone steps against 4-regeneration "
                              "seed-replay baseline steps")
    p_bench.add_argument("--report", help="write bench results JSON here")
    p_bench.set_defaults(func=cmd_bench)

    p_fig = add_parser("reproduce-fig2",
                           help="synthetic quadratic speedup protocol, end to end")
    p_fig.add_argument("--seeds", type=int, default=5, help="number of seeds (0..N-1)")
    p_fig.add_argument("--seed-list", help="explicit comma-separated seeds")
    p_fig.add_argument("--tuning-steps", dest="tuning_steps", type=int, default=10_000)
    p_fig.add_argument("--final-steps", dest="final_steps", type=int, default=100_000)
    p_fig.add_argument("--log-every", dest="log_every", type=int, default=100)
    p_fig.add_argument("--output-dir", dest="output_dir")
    p_fig.add_argument("--workers", type=int, default=1)
    p_fig.set_defaults(func=cmd_fig2)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return 2 if err.code not in (0, None) else 0
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
