"""Experiment orchestration: single runs, hyperparameter grids, multi-seed
aggregation, trajectory logging, the synthetic speedup experiment, and the
per-step wall-time bench.

Conventions
-----------
* The per-step "objective" is the midpoint of the two evaluations,
  (f(x + lam z) + f(x - lam z)) / 2 = f(x) + O(lam^2), measured at the step's
  pre-update iterate; the strict two-evaluations-per-step budget leaves no
  third call for f(x) itself.  Row ``step`` is the 1-based number of the step
  that produced the measurement.
* A run is a pure function of (config, seed): trajectories are byte-identical
  across invocations except for the wall_ns timing column.
* Each seed draws its own initial iterate (problems that accept ``init_seed``
  get the run seed unless the problem spec pins one explicitly).
* Diverged runs (non-finite objective, or objective above 1e6 x the first
  measurement) keep their partial trajectory and are flagged, not raised.
"""
from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .analysis import track_alignment
from .estimator import NonFiniteValueError, Objective
from .optimizers import (ConeConfig, OPT_CONMEZO, OPT_MEZO, OPT_MEZO_MOMENTUM,
                         OPTIMIZERS, init_state, step)
from .problems import make_problem, parse_problem_spec
from .vec import norm as vnorm

DIVERGENCE_FACTOR = 1e6

#: Frozen synthetic-benchmark preset (the `reproduce-fig2` subcommand):
#: d=1000 quadratic, smoothing 1e-2, initial radius 10, no warm-up,
#: and these tuning grids.
FIG2_ETA_GRID = (1.0, 1e-1, 1e-2, 1e-3, 1e-4)
FIG2_BETA_GRID = (0.8, 0.9, 0.95, 0.99)
FIG2_THETA_GRID = (1.2, 1.3, 1.4, 1.5)

CSV_HEADER = "step,objective,grad_norm,cos2_rho,beta_t,theta,wall_ns"


@dataclass
class ExperimentConfig:
    problem: str
    optimizer: str
    cone: ConeConfig
    seeds: Sequence[int]
    log_every: int = 100
    output_dir: Optional[str] = None
    name: str = "experiment"
    grad_diagnostics: bool = False

    def validate(self) -> "ExperimentConfig":
        if self.optimizer not in OPTIMIZERS:
            raise ValueError(f"unknown optimizer {self.optimizer!r}; have {OPTIMIZERS}")
        parse_problem_spec(self.problem)
        if not self.seeds:
            raise ValueError("seeds must be non-empty")
        if len(set(self.seeds)) != len(self.seeds):
            raise ValueError("seeds must be distinct")
        if self.log_every < 1:
            raise ValueError("log_every must be >= 1")
        self.cone.validate()
        return self


@dataclass
class Trajectory:
    """Logged rows (at log_every cadence plus the final step)."""

    steps: np.ndarray
    objective: np.ndarray
    grad_norm: np.ndarray     # nan where not collected
    cos2_rho: np.ndarray      # nan where not collected / undefined
    beta_t: np.ndarray        # nan for optimizers without momentum
    theta: np.ndarray
    wall_ns: np.ndarray


@dataclass
class RunSummary:
    final_objective: float
    best_objective: float
    steps_to_target: Optional[int]
    evals: int
    total_wall_ns: int
    diverged: bool
    diverged_reason: str = ""

    def as_json(self) -> dict:
        return {
            "final_objective": self.final_objective,
            "best_objective": self.best_objective,
            "steps_to_target": self.steps_to_target,
            "evals": self.evals,
            "total_wall_ns": self.total_wall_ns,
            "diverged": self.diverged,
            "diverged_reason": self.diverged_reason,
        }


@dataclass
class RunResult:
    trajectory: Trajectory
    summary: RunSummary
    dense_objective: np.ndarray            # per-step midpoint objective
    dense_grad_sq: Optional[np.ndarray] = None


def _resolved_problem(cfg: ExperimentConfig, seed: int):
    name, params = parse_problem_spec(cfg.problem)
    if name in ("quadratic", "sphere") and "init_seed" not in params:
        params["init_seed"] = seed
    return make_problem(name, **params)


def run_single(cfg: ExperimentConfig, seed: int, target: Optional[float] = None,
               collect_grad_sq: bool = False) -> RunResult:
    """One deterministic run; writes nothing (see ``write_run``)."""
    cfg.validate()
    problem = _resolved_problem(cfg, seed)
    f = problem.objective
    cone = cfg.cone
    state = init_state(cfg.optimizer, problem.x0, cone, seed)
    total = cone.total_steps

    dense = np.empty(total, dtype=np.float64)
    dense_grad = np.empty(total, dtype=np.float64) if collect_grad_sq else None
    rows: list[tuple] = []
    steps_to_target: Optional[int] = None
    diverged = False
    reason = ""
    f0_scale: Optional[float] = None
    t_start = time.perf_counter_ns()

    executed = 0
    for t in range(total):
        try:
            report = step(cfg.optimizer, state, f, cone)
        except NonFiniteValueError as err:
            diverged, reason = True, f"non-finite objective value: {err}"
            break
        executed += 1
        obj = report.objective
        dense[t] = obj
        if collect_grad_sq:
            g = f.grad(state.x)
            dense_grad[t] = float(np.dot(g, g))
        if f0_scale is None:
            f0_scale = max(abs(obj), 1e-300)
        if target is not None and steps_to_target is None and obj <= target:
            steps_to_target = t + 1
        is_last = t == total - 1
        if t % cfg.log_every == 0 or is_last:
            if cfg.grad_diagnostics and f.has_grad:
                grad = f.grad(state.x)
                gn = vnorm(grad)
                c2 = track_alignment(state.m, grad) if state.m is not None else None
            else:
                gn, c2 = None, None
            rows.append((t + 1, obj, gn, c2, report.beta_t, cone.theta,
                         time.perf_counter_ns() - t_start))
        if not math.isfinite(obj) or abs(obj) > DIVERGENCE_FACTOR * f0_scale:
            diverged, reason = True, f"objective {obj!r} beyond divergence guard at step {t + 1}"
            break

    dense = dense[:executed]
    if dense_grad is not None:
        dense_grad = dense_grad[:executed]

    def col(idx, fill=np.nan):
        return np.array([np.nan if r[idx] is None else r[idx] for r in rows], dtype=np.float64)

    traj = Trajectory(
        steps=np.array([r[0] for r in rows], dtype=np.int64),
        objective=col(1), grad_norm=col(2), cos2_rho=col(3),
        beta_t=col(4), theta=col(5),
        wall_ns=np.array([r[6] for r in rows], dtype=np.int64),
    )
    summary = RunSummary(
        final_objective=float(dense[-1]) if executed else math.nan,
        best_objective=float(np.nanmin(dense)) if executed else math.nan,
        steps_to_target=steps_to_target,
        evals=f.eval_count,
        total_wall_ns=time.perf_counter_ns() - t_start,
        diverged=diverged,
        diverged_reason=reason,
    )
    return RunResult(traj, summary, dense, dense_grad)


# ---------------------------------------------------------------------------
# Serialization


def _fmt(v: float) -> str:
    return "" if v is None or (isinstance(v, float) and math.isnan(v)) else f"{v:.17g}"


def trajectory_csv(traj: Trajectory) -> str:
    lines = [CSV_HEADER]
    for i in range(traj.steps.shape[0]):
        lines.append(",".join([
            str(int(traj.steps[i])),
            _fmt(float(traj.objective[i])),
            _fmt(float(traj.grad_norm[i])),
            _fmt(float(traj.cos2_rho[i])),
            _fmt(float(traj.beta_t[i])),
            _fmt(float(traj.theta[i])),
            str(int(traj.wall_ns[i])),
        ]))
    return "\n".join(lines) + "\n"


def write_run(dirpath: str, seed: int, result: RunResult) -> str:
    os.makedirs(dirpath, exist_ok=True)
    path = os.path.join(dirpath, f"seed-{seed}.csv")
    with open(path, "w") as fh:
        fh.write(trajectory_csv(result.trajectory))
    return path


def write_json(path: str, payload: dict) -> None:
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def config_echo(cfg: ExperimentConfig) -> dict:
    cone = cfg.cone
    return {
        "problem": cfg.problem,
        "optimizer": cfg.optimizer,
        "theta": cone.theta,
        "beta": cone.beta_final,
        "eta": cone.eta,
        "lambda": cone.lam,
        "steps": cone.total_steps,
        "dist": cone.dist,
        "warmup": cone.warmup,
        "memory": cone.memory,
        "seeds": list(cfg.seeds),
        "log_every": cfg.log_every,
        "output_dir": cfg.output_dir,
        "name": cfg.name,
        "grad_diagnostics": cfg.grad_diagnostics,
        "kernels": kernels.active().BACKEND,
    }


# ---------------------------------------------------------------------------
# Grids


def grid_keys_for(optimizer: str) -> tuple[str, ...]:
    """The hyperparameters an optimizer's grid actually varies."""
    if optimizer == OPT_MEZO:
        return ("eta",)
    if optimizer == OPT_MEZO_MOMENTUM:
        return ("eta", "beta")
    return ("eta", "beta", "theta")


def cell_id(params: dict) -> str:
    return ",".join(f"{k}={params[k]:g}" for k in sorted(params))


def _apply_cell(cone: ConeConfig, params: dict) -> ConeConfig:
    updates = {}
    if "eta" in params:
        updates["eta"] = params["eta"]
    if "beta" in params:
        updates["beta_final"] = params["beta"]
    if "theta" in params:
        updates["theta"] = params["theta"]
    return replace(cone, **updates)


def _run_task(payload: dict):
    """Worker entry point (picklable): one (cell, seed) run."""
    cfg = ExperimentConfig(
        problem=payload["problem"], optimizer=payload["optimizer"],
        cone=payload["cone"], seeds=[payload["seed"]],
        log_every=payload["log_every"], name=payload["name"],
        grad_diagnostics=payload.get("grad_diagnostics", False),
    )
    result = run_single(cfg, payload["seed"])
    out = {
        "cell": payload["cell"],
        "seed": payload["seed"],
        "summary": result.summary,
        "trajectory": result.trajectory,
    }
    if payload.get("keep_dense"):
        out["dense"] = result.dense_objective
    return out


@dataclass
class GridCell:
    cell_id: str
    params: dict
    final_objectives: dict            # seed -> final objective (inf if diverged)
    mean_final: float
    std_final: float
    diverged_seeds: list
    selected: bool = False


@dataclass
class GridReport:
    optimizer: str
    problem: str
    seeds: list
    steps: int
    cells: list
    selected_cell: str

    def as_json(self) -> dict:
        return {
            "optimizer": self.optimizer,
            "problem": self.problem,
            "seeds": self.seeds,
            "steps": self.steps,
            "selected_cell": self.selected_cell,
            "cells": [{
                "cell_id": c.cell_id,
                "params": c.params,
                "final_objectives": {str(k): v for k, v in c.final_objectives.items()},
                "mean_final": c.mean_final,
                "std_final": c.std_final,
                "diverged_seeds": c.diverged_seeds,
                "selected": c.selected,
            } for c in self.cells],
        }


def _grid_cells(optimizer: str, grid: dict) -> list[dict]:
    keys = [k for k in grid_keys_for(optimizer) if k in grid]
    if not keys:
        raise ValueError("grid is empty for this optimizer")
    cells = [{}]
    for key in keys:
        cells = [dict(c, **{key: float(v)}) for c in cells for v in grid[key]]
    return cells


def select_cell(cells: list[GridCell]) -> GridCell:
    """Minimum mean final objective; ties -> smaller eta, smaller theta, larger beta."""
    finite = [c for c in cells if math.isfinite(c.mean_final)]
    if not finite:
        raise RuntimeError("all grid cells diverged")

    def key(c: GridCell):
        p = c.params
        return (c.mean_final, p.get("eta", 0.0), p.get("theta", 0.0), -p.get("beta", 0.0))

    return min(finite, key=key)


def run_grid(cfg: ExperimentConfig, grid: dict, workers: int = 1) -> GridReport:
    """Evaluate every cell over all seeds; select by mean final objective.

    Diverged runs count as +inf.  Execution order never affects results (each
    run is a pure function of its payload), so worker parallelism is safe.
    """
    cfg.validate()
    cells = _grid_cells(cfg.optimizer, grid)
    payloads = []
    for params in cells:
        cone = _apply_cell(cfg.cone, params)
        for seed in cfg.seeds:
            payloads.append({
                "problem": cfg.problem, "optimizer": cfg.optimizer, "cone": cone,
                "seed": seed, "log_every": cfg.log_every, "name": cfg.name,
                "cell": cell_id(params),
            })
    results = _execute(payloads, workers)

    by_cell: dict[str, dict] = {}
    for params in cells:
        by_cell[cell_id(params)] = {"params": params, "runs": {}}
    for res in results:
        by_cell[res["cell"]]["runs"][res["seed"]] = res

    report_cells = []
    for cid, bundle in by_cell.items():
        finals = {}
        diverged = []
        for seed in cfg.seeds:
            run = bundle["runs"][seed]
            s: RunSummary = run["summary"]
            if s.diverged or not math.isfinite(s.final_objective):
                finals[seed] = math.inf
                diverged.append(seed)
            else:
                finals[seed] = s.final_objective
        vals = np.array(list(finals.values()))
        mean = float(np.mean(vals)) if np.all(np.isfinite(vals)) else math.inf
        std = float(np.std(vals)) if np.all(np.isfinite(vals)) else math.inf
        report_cells.append(GridCell(cid, bundle["params"], finals, mean, std, diverged))

    best = select_cell(report_cells)
    for c in report_cells:
        c.selected = c.cell_id == best.cell_id
    report = GridReport(cfg.optimizer, cfg.problem, list(cfg.seeds),
                        cfg.cone.total_steps, report_cells, best.cell_id)

    if cfg.output_dir:
        base = os.path.join(cfg.output_dir, cfg.name)
        write_json(os.path.join(base, "grid_report.json"), report.as_json())
        write_json(os.path.join(base, "config.json"),
                   dict(config_echo(cfg), grid={k: list(map(float, v)) for k, v in grid.items()
                                                if k in grid_keys_for(cfg.optimizer)}))
        for res in results:
            cell_dir = os.path.join(base, res["cell"])
            os.makedirs(cell_dir, exist_ok=True)
            with open(os.path.join(cell_dir, f"seed-{res['seed']}.csv"), "w") as fh:
                fh.write(trajectory_csv(res["trajectory"]))
        for c in report_cells:
            write_json(os.path.join(base, c.cell_id, "summary.json"), {
                "params": c.params, "mean_final": c.mean_final, "std_final": c.std_final,
                "final_objectives": {str(k): v for k, v in c.final_objectives.items()},
                "diverged_seeds": c.diverged_seeds, "selected": c.selected,
            })
    return report


def _execute(payloads: list[dict], workers: int) -> list[dict]:
    if workers <= 1 or len(payloads) <= 1:
        return [_run_task(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_task, payloads, chunksize=1))


# ---------------------------------------------------------------------------
# Speedup


@dataclass
class SpeedupResult:
    ratio: Optional[float]
    reached: bool
    target: float
    crossing_step: Optional[int]
    baseline_steps: int

    def as_json(self) -> dict:
        return {"ratio": self.ratio, "reached": self.reached, "target": self.target,
                "crossing_step": self.crossing_step, "baseline_steps": self.baseline_steps}


def speedup(test_curve: np.ndarray, baseline_curve: np.ndarray) -> SpeedupResult:
    """baseline_steps / (first step whose objective reaches the baseline's
    final objective).  Curves are per-step (seed-mean) objectives; flagged
    unreached rather than raising when the target is never hit."""
    test_curve = np.asarray(test_curve, dtype=np.float64)
    baseline_curve = np.asarray(baseline_curve, dtype=np.float64)
    target = float(baseline_curve[-1])
    baseline_steps = int(baseline_curve.shape[0])
    hits = np.nonzero(test_curve <= target)[0]
    if hits.size == 0:
        return SpeedupResult(None, False, target, None, baseline_steps)
    crossing = int(hits[0]) + 1
    return SpeedupResult(baseline_steps / crossing, True, target, crossing, baseline_steps)


def mean_curve(denses: list[np.ndarray]) -> np.ndarray:
    """Arithmetic per-step mean over seeds (runs must share the horizon)."""
    length = min(d.shape[0] for d in denses)
    return np.mean(np.stack([d[:length] for d in denses]), axis=0)


def reproduce_fig2(output_dir: Optional[str] = None, seeds: Sequence[int] = (0, 1, 2, 3, 4),
                   tuning_steps: int = 10_000, final_steps: int = 100_000,
                   workers: int = 1, log_every: int = 100) -> dict:
    """The synthetic-quadratic speedup protocol, end to end.

    d=1000 geometric-spectrum quadratic, smoothing 1e-2, initial radius 10,
    sphere directions, no warm-up.  Both optimizers are tuned on their printed
    grids over ``tuning_steps`` (mean final objective over the seeds selects
    the cell), the selected cells rerun for ``final_steps``, and the speedup is
    the baseline horizon over the first step at which the cone optimizer's
    seed-mean objective reaches the baseline's final seed-mean objective.
    The crossing uses the plain mean curve (averaging log-objectives instead
    would shift the ratio slightly).
    """
    base_cone = ConeConfig(lam=1e-2, total_steps=tuning_steps, dist="sphere",
                           warmup="none", memory="buffered")
    grids = {
        OPT_MEZO: {"eta": FIG2_ETA_GRID},
        OPT_CONMEZO: {"eta": FIG2_ETA_GRID, "beta": FIG2_BETA_GRID, "theta": FIG2_THETA_GRID},
    }
    selected = {}
    reports = {}
    for opt in (OPT_MEZO, OPT_CONMEZO):
        cfg = ExperimentConfig(problem="quadratic:d=1000", optimizer=opt,
                               cone=base_cone, seeds=list(seeds), log_every=log_every,
                               output_dir=output_dir, name=f"fig2-tuning-{opt}")
        report = run_grid(cfg, grids[opt], workers=workers)
        reports[opt] = report
        selected[opt] = next(c for c in report.cells if c.selected)

    curves = {}
    finals = {}
    for opt in (OPT_MEZO, OPT_CONMEZO):
        cone = _apply_cell(replace(base_cone, total_steps=final_steps), selected[opt].params)
        cfg = ExperimentConfig(problem="quadratic:d=1000", optimizer=opt, cone=cone,
                               seeds=list(seeds), log_every=log_every,
                               output_dir=output_dir, name=f"fig2-final-{opt}")
        payloads = [{
            "problem": cfg.problem, "optimizer": opt, "cone": cone, "seed": s,
            "log_every": log_every, "name": cfg.name, "cell": cell_id(selected[opt].params),
            "keep_dense": True,
        } for s in seeds]
        results = _execute(payloads, workers)
        curves[opt] = mean_curve([r["dense"] for r in results])
        finals[opt] = {r["seed"]: r["summary"].final_objective for r in results}
        if output_dir:
            base = os.path.join(output_dir, cfg.name)
            write_json(os.path.join(base, "config.json"), config_echo(cfg))
            for r in results:
                cell_dir = os.path.join(base, r["cell"])
                os.makedirs(cell_dir, exist_ok=True)
                with open(os.path.join(cell_dir, f"seed-{r['seed']}.csv"), "w") as fh:
                    fh.write(trajectory_csv(r["trajectory"]))

    result = speedup(curves[OPT_CONMEZO], curves[OPT_MEZO])
    summary = {
        "speedup": result.as_json(),
        "selected": {opt: selected[opt].params for opt in selected},
        "tuning_steps": tuning_steps,
        "final_steps": final_steps,
        "seeds": list(seeds),
        "mean_final": {opt: float(np.mean(list(finals[opt].values()))) for opt in finals},
    }
    if output_dir:
        write_json(os.path.join(output_dir, "fig2-speedup.json"), summary)
    return dict(summary, curves=curves, reports=reports)


# ---------------------------------------------------------------------------
# Step timing


@dataclass
class BenchResult:
    optimizer: str
    memory: str
    d: int
    n_steps: int
    median_ns: float
    per_step_ns: np.ndarray
    kernels: str

    def as_json(self) -> dict:
        return {"optimizer": self.optimizer, "memory": self.memory, "d": self.d,
                "n_steps": self.n_steps, "median_ns": self.median_ns,
                "kernels": self.kernels}


def bench_step_time(optimizer: str, d: int, memory: str, n_steps: int,
                    dist: str = "gaussian", warmup_steps: int = 3) -> BenchResult:
    """Median per-step wall time on a constant objective, so the vector and
    stream work (not f) dominates.  Refuses d < 1e5 where call overhead would
    drown the measurement.  Gaussian directions by default: that mode has the
    canonical regeneration counts (4 per seed-replay step without a momentum
    buffer, 2 with one)."""
    if d < 100_000:
        raise ValueError("bench needs d >= 1e5; smaller sizes measure overhead, not kernels")
    f = Objective(d, lambda x: 0.0, name="constant")
    cfg = ConeConfig(theta=1.3, beta_final=0.9, eta=1e-3, lam=1e-3,
                     total_steps=warmup_steps + n_steps, dist=dist, memory=memory)
    state = init_state(optimizer, np.zeros(d), cfg, seed=0)
    for _ in range(warmup_steps):
        step(optimizer, state, f, cfg)
    times = np.empty(n_steps, dtype=np.int64)
    for i in range(n_steps):
        t0 = time.perf_counter_ns()
        step(optimizer, state, f, cfg)
        times[i] = time.perf_counter_ns() - t0
    return BenchResult(optimizer, memory, d, n_steps, float(np.median(times)),
                       times, kernels.active().BACKEND)
