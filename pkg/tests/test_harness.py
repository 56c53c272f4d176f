"""Harness: run determinism, CSV schema, grid selection, speedup, aggregation,
and the step-time bench."""
import json
import math
import os

import numpy as np
import pytest

from conezo.harness import (CSV_HEADER, ExperimentConfig, GridCell, bench_step_time,
                            cell_id, config_echo, grid_keys_for, mean_curve,
                            reproduce_fig2, run_grid, run_single, select_cell,
                            speedup, trajectory_csv, write_run)
from conezo.optimizers import ConeConfig


def make_exp(optimizer="mezo", problem="sphere:d=10", steps=1000, seeds=(7,), **kw):
    cone_kw = dict(theta=1.3, beta_final=0.9, eta=0.01, lam=1e-3,
                   total_steps=steps, dist="sphere", warmup="none", memory="buffered")
    cone_kw.update(kw.pop("cone", {}))
    return ExperimentConfig(problem=problem, optimizer=optimizer,
                            cone=ConeConfig(**cone_kw), seeds=list(seeds), **kw)


def strip_wall(csv_text: str) -> str:
    lines = csv_text.strip().split("\n")
    return "\n".join(",".join(line.split(",")[:-1]) for line in lines)


def test_run_is_deterministic_modulo_timing():
    cfg = make_exp()
    r1 = run_single(cfg, 7)
    r2 = run_single(cfg, 7)
    assert strip_wall(trajectory_csv(r1.trajectory)) == strip_wall(trajectory_csv(r2.trajectory))
    assert np.array_equal(r1.dense_objective, r2.dense_objective)
    assert r1.summary.final_objective == r2.summary.final_objective


def test_eval_budget_in_summary():
    cfg = make_exp(steps=1000)
    res = run_single(cfg, 7)
    assert res.summary.evals == 2000
    assert res.summary.diverged is False


def test_csv_schema_and_roundtrip(tmp_path):
    cfg = make_exp(steps=100, cone={"total_steps": 100})
    cfg.log_every = 7
    cfg.grad_diagnostics = True
    res = run_single(cfg, 1)
    text = trajectory_csv(res.trajectory)
    lines = text.strip().split("\n")
    assert lines[0] == CSV_HEADER
    # final step always logged
    assert lines[-1].split(",")[0] == "100"
    # 17-significant-digit round trip
    first = lines[1].split(",")
    assert float(first[1]) == res.trajectory.objective[0]
    # mezo has no momentum: cos2_rho empty, grad_norm present
    assert first[3] == ""
    assert first[2] != ""
    path = write_run(str(tmp_path), 1, res)
    assert os.path.exists(path)


def test_steps_strictly_increasing():
    cfg = make_exp(steps=95)
    cfg.cone.total_steps = 95
    cfg.log_every = 10
    res = run_single(cfg, 3)
    assert np.all(np.diff(res.trajectory.steps) > 0)
    assert res.trajectory.steps[-1] == 95


def test_divergence_flagged_not_raised():
    cfg = make_exp(problem="quadratic:d=50", cone={"eta": 10.0, "total_steps": 4000})
    res = run_single(cfg, 0)
    assert res.summary.diverged
    assert res.summary.diverged_reason
    assert res.dense_objective.shape[0] < 4000  # partial trajectory retained


def test_config_validation_errors():
    with pytest.raises(ValueError):
        make_exp(seeds=()).validate()
    with pytest.raises(ValueError):
        make_exp(seeds=(1, 1)).validate()
    cfg = make_exp()
    cfg.log_every = 0
    with pytest.raises(ValueError):
        cfg.validate()
    with pytest.raises(ValueError):
        make_exp(optimizer="adam").validate()


class TestGrid:
    def test_single_cell_selected(self):
        cfg = make_exp(steps=50, seeds=(0, 1), cone={"total_steps": 50})
        report = run_grid(cfg, {"eta": [0.01]})
        assert len(report.cells) == 1
        assert report.cells[0].selected
        assert report.selected_cell == cell_id({"eta": 0.01})

    def test_mezo_grid_ignores_beta_theta(self):
        cfg = make_exp(steps=30, cone={"total_steps": 30})
        report = run_grid(cfg, {"eta": [0.1, 0.01], "beta": [0.8, 0.9], "theta": [1.2]})
        assert len(report.cells) == 2
        assert grid_keys_for("mezo") == ("eta",)
        assert grid_keys_for("conmezo") == ("eta", "beta", "theta")

    def test_conmezo_grid_cell_count(self):
        cfg = make_exp(optimizer="conmezo", steps=20, cone={"total_steps": 20})
        report = run_grid(cfg, {"eta": [0.01, 0.001], "beta": [0.8, 0.9], "theta": [1.2, 1.4]})
        assert len(report.cells) == 8

    def test_tie_breaking(self):
        cells = [
            GridCell("a", {"eta": 0.1, "theta": 1.4, "beta": 0.8}, {}, 1.0, 0.0, []),
            GridCell("b", {"eta": 0.01, "theta": 1.4, "beta": 0.8}, {}, 1.0, 0.0, []),
            GridCell("c", {"eta": 0.01, "theta": 1.2, "beta": 0.8}, {}, 1.0, 0.0, []),
            GridCell("d", {"eta": 0.01, "theta": 1.2, "beta": 0.9}, {}, 1.0, 0.0, []),
        ]
        assert select_cell(cells).cell_id == "d"  # smaller eta, smaller theta, larger beta

    def test_diverged_cells_get_infinity(self):
        cfg = make_exp(problem="quadratic:d=20", steps=2000, seeds=(0, 1),
                       cone={"total_steps": 2000})
        report = run_grid(cfg, {"eta": [100.0, 1e-4]})
        by_id = {c.cell_id: c for c in report.cells}
        assert math.isinf(by_id[cell_id({"eta": 100.0})].mean_final)
        assert report.selected_cell == cell_id({"eta": 1e-4})

    def test_all_diverged_raises(self):
        with pytest.raises(RuntimeError):
            select_cell([GridCell("a", {"eta": 1.0}, {}, math.inf, math.inf, [0])])

    def test_workers_do_not_change_results(self):
        cfg = make_exp(steps=40, seeds=(0, 1), cone={"total_steps": 40})
        r1 = run_grid(cfg, {"eta": [0.1, 0.01]}, workers=1)
        r2 = run_grid(cfg, {"eta": [0.1, 0.01]}, workers=2)
        f1 = {c.cell_id: c.final_objectives for c in r1.cells}
        f2 = {c.cell_id: c.final_objectives for c in r2.cells}
        assert f1 == f2

    def test_grid_report_reselectable_and_written(self, tmp_path):
        cfg = make_exp(steps=30, seeds=(0, 1), cone={"total_steps": 30},
                       output_dir=str(tmp_path), name="gridcheck")
        report = run_grid(cfg, {"eta": [0.1, 0.01]})
        path = tmp_path / "gridcheck" / "grid_report.json"
        assert path.exists()
        saved = json.loads(path.read_text())
        means = {c["cell_id"]: c["mean_final"] for c in saved["cells"]}
        assert min(means, key=means.get) == saved["selected_cell"]
        for c in report.cells:
            assert (tmp_path / "gridcheck" / c.cell_id / "seed-0.csv").exists()
            assert (tmp_path / "gridcheck" / c.cell_id / "summary.json").exists()
        assert (tmp_path / "gridcheck" / "config.json").exists()


class TestSpeedup:
    def test_identical_curves(self):
        curve = np.linspace(10.0, 1.0, 500)
        res = speedup(curve, curve)
        assert res.ratio == 1.0 and res.reached

    def test_against_linear_scan_oracle(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            base = np.sort(rng.uniform(0.5, 10.0, size=400))[::-1]
            fast = np.sort(rng.uniform(0.0, 9.0, size=400))[::-1]
            res = speedup(fast, base)
            target = base[-1]
            crossing = None
            for i, v in enumerate(fast):       # brute-force scan
                if v <= target:
                    crossing = i + 1
                    break
            if crossing is None:
                assert not res.reached
            else:
                assert res.crossing_step == crossing
                assert res.ratio == pytest.approx(400 / crossing)

    def test_never_reached_flagged(self):
        res = speedup(np.full(100, 5.0), np.linspace(10, 1, 100))
        assert not res.reached and res.ratio is None

    def test_mean_curve_is_arithmetic_mean(self):
        a = np.arange(10.0)
        b = np.arange(10.0) * 3.0
        assert np.array_equal(mean_curve([a, b]), (a + b) / 2.0)


def test_fig2_protocol_smoke(tmp_path):
    out = reproduce_fig2(output_dir=str(tmp_path), seeds=(0,), tuning_steps=300,
                         final_steps=600, workers=1, log_every=50)
    assert "mezo" in out["selected"] and "conmezo" in out["selected"]
    assert (tmp_path / "fig2-speedup.json").exists()
    assert (tmp_path / "fig2-tuning-mezo" / "grid_report.json").exists()
    sp = out["speedup"]
    assert sp["reached"] in (True, False)


class TestBench:
    def test_refuses_small_dimension(self):
        with pytest.raises(ValueError):
            bench_step_time("mezo", 10, "buffered", 5)

    def test_measurement_stability(self):
        r1 = bench_step_time("mezo", 100_000, "buffered", 60, warmup_steps=5)
        r2 = bench_step_time("mezo", 100_000, "buffered", 60, warmup_steps=5)
        assert abs(r1.median_ns - r2.median_ns) <= 0.2 * max(r1.median_ns, r2.median_ns)

    def test_constant_objective_budget(self):
        res = bench_step_time("conmezo", 100_000, "seed_replay", 10)
        assert res.n_steps == 10 and res.per_step_ns.shape == (10,)


def test_config_echo_is_complete():
    cfg = make_exp()
    echo = config_echo(cfg)
    for key in ("problem", "optimizer", "theta", "beta", "eta", "lambda", "steps",
                "dist", "warmup", "memory", "seeds", "log_every", "kernels"):
        assert key in echo
