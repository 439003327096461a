# Copyright 2026 The FaultPad Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ==============================================================================

import json
import os

import numpy as np
import pytest

from harness.monte_carlo import ExperimentConfig, Metrics, run_monte_carlo
from harness.plots import plot_compare, plot_sweep
from harness.studies import compare, diagnose, point_from_config, run_single
from harness.sweep import ABLATION_MATRIX, ablate, run_mismatch_study, run_sweep
from harness.trial import SweepPoint, run_trial, trial_rngs
from harness.utils import read_jsonl
from lib.myutil import SweepAbort
from main import main


def _small(gain_cfg, **kwargs):
    exp = {"trials": 6, "N_list": [5], "modes": ["passive"], "workers": 1}
    exp.update(kwargs.pop("experiment", {}))
    return gain_cfg(experiment=exp, **kwargs)


# -------------------------------------------------
# Trials

def test_trial_rngs_are_keyed():
    a, _ = trial_rngs(0, 3, 0)
    b, _ = trial_rngs(0, 3, 0)
    c, _ = trial_rngs(0, 4, 0)
    d, m = trial_rngs(0, 3, 1)
    x = a.random(4)
    np.testing.assert_array_equal(x, b.random(4))
    assert not np.array_equal(x, c.random(4))
    assert not np.array_equal(x, d.random(4))


@pytest.mark.parametrize("mode", ["passive", "active"])
def test_run_trial_is_deterministic(gain_cfg, mode):
    cfg = gain_cfg(pi_star=0.5)
    point = SweepPoint(mode=mode, N=5)
    a = run_trial(cfg, point, 7, master_seed=3, f_trace=True)
    b = run_trial(cfg, point, 7, master_seed=3, f_trace=True)
    assert a.to_dict() == b.to_dict()
    assert a.trace == b.trace


def test_truth_draw_follows_pi_star(gain_cfg):
    point = SweepPoint(N=5)
    for trial in range(10):
        assert run_trial(gain_cfg(pi_star=1.0), point, trial).truth_in_M
        res = run_trial(gain_cfg(pi_star=0.0), point, trial)
        assert not res.truth_in_M
        assert res.truth == "unmodeled"


def test_unmodeled_failure_is_any_identification(gain_cfg):
    point = SweepPoint(N=5, f_renorm=False, f_reject=False)
    for trial in range(10):
        res = run_trial(gain_cfg(pi_star=0.0), point, trial)
        assert res.failure == int(not res.decision.is_null)


def test_zero_mismatch_changes_nothing(gain_cfg):
    cfg = gain_cfg(pi_star=0.5)
    for trial in range(5):
        a = run_trial(cfg, SweepPoint(mode="active", N=5), trial, f_trace=True)
        b = run_trial(cfg, SweepPoint(mode="active", N=5, f_mismatch=True), trial, f_trace=True)
        assert a.to_dict() == b.to_dict()
        assert a.trace == b.trace


def test_blowup_aborts_after_retries(gain_cfg):
    with pytest.raises(SweepAbort):
        run_trial(gain_cfg(a=1e7), SweepPoint(N=5), 0)


def test_trial_trace_file(gain_cfg, tmp_path):
    res = run_trial(gain_cfg(), SweepPoint(N=5), 2, trace_dir=str(tmp_path))
    lines = read_jsonl(str(tmp_path / "trial_2.jsonl"))
    assert lines[0]["trial"] == 2
    assert lines[0]["labels"] == ["gain_1", "gain_5"]
    assert lines[-1]["decision"] == res.decision.to_dict()
    assert [rec["k"] for rec in lines[1:-1]] == list(range(len(lines) - 2))


# -------------------------------------------------
# Monte Carlo

def test_experiment_points(gain_cfg):
    cfg = gain_cfg(experiment={"modes": ["passive", "active"], "N_list": [5, 10, 25],
                               "noise_list": [1.0, 2.0], "ablations": ABLATION_MATRIX,
                               "authority_scale": [1.0, 0.5]})
    points = list(ExperimentConfig(cfg).points())
    assert len(points) == 2 * 4 * 2 * 2 * 3
    assert points[0].to_dict() == SweepPoint(mode="passive", N=5).to_dict()


def test_metrics_are_consistent(gain_cfg):
    cfg = _small(gain_cfg, pi_star=0.5)
    point = SweepPoint(N=5)
    metrics, results = run_monte_carlo(cfg, point, trials=20, master_seed=1)
    assert [r.trial for r in results] == list(range(20))
    assert metrics.trials == 20
    assert metrics.failures == metrics.failures_in_M + metrics.failures_out_M
    assert sum(metrics.outcomes.values()) == 20
    assert metrics.outcomes["NULL"] == round(metrics.null_rate * 20)
    assert metrics.min_delay is None or metrics.min_delay >= point.N - 1
    assert metrics.stderr == pytest.approx(np.sqrt(metrics.failure_rate * (1 - metrics.failure_rate) / 20))
    row = metrics.to_row()
    assert row["out_gain_1"] + row["out_gain_5"] + row["out_NULL"] == 20


def test_metrics_of_null_only_results(gain_cfg):
    cfg = gain_cfg(N=5, horizon=2)
    results = [run_trial(cfg, SweepPoint(N=5), t) for t in range(3)]
    metrics = Metrics(SweepPoint(N=5), results, ["gain_1", "gain_5"])
    assert metrics.null_rate == 1.0
    assert np.isnan(metrics.avg_delay)
    assert metrics.min_delay is None


@pytest.mark.slow
def test_worker_count_does_not_change_results(gain_cfg):
    cfg = _small(gain_cfg, pi_star=0.5)
    point = SweepPoint(mode="active", N=5)
    m1, r1 = run_monte_carlo(cfg, point, trials=16, master_seed=4, workers=1)
    m2, r2 = run_monte_carlo(cfg, point, trials=16, master_seed=4, workers=2)
    assert [r.to_dict() for r in r1] == [r.to_dict() for r in r2]
    assert m1.to_row() == m2.to_row()


# -------------------------------------------------
# Sweeps and studies

def test_run_sweep_writes_outputs(gain_cfg, tmp_path):
    cfg = _small(gain_cfg, experiment={"modes": ["passive", "active"]})
    df = run_sweep(cfg, out_dir=str(tmp_path), workers=1, f_plots=True, f_traces=True)
    assert len(df) == 2
    assert set(df["mode"]) == {"passive", "active"}
    for name in ["sweep.csv", "summary.json", "log.jsonl", "sweep_failure.png", "sweep_delay.png"]:
        assert (tmp_path / name).exists()
    log = read_jsonl(str(tmp_path / "log.jsonl"))
    assert log[0]["tag"] == "sweep"
    assert len(log) == 3
    assert sorted(os.listdir(str(tmp_path / "traces"))) == ["point_0", "point_1"]
    assert len(os.listdir(str(tmp_path / "traces" / "point_1"))) == 6
    assert set(df["objective_cov"]) == {"candidate"}
    with open(str(tmp_path / "summary.json")) as f:
        summary = json.load(f)
    assert len(summary["points"]) == 2
    assert summary["objective_cov"] == "candidate"


def test_aborted_sweep_closes_log(gain_cfg, tmp_path):
    cfg = _small(gain_cfg, a=1e7, experiment={"trials": 1})
    with pytest.raises(SweepAbort):
        run_sweep(cfg, out_dir=str(tmp_path), workers=1, f_plots=False)
    log = read_jsonl(str(tmp_path / "log.jsonl"))
    assert len(log) == 1
    assert log[0]["tag"] == "sweep"
    assert not (tmp_path / "sweep.csv").exists()


def test_ablate_covers_matrix(gain_cfg, tmp_path):
    cfg = _small(gain_cfg, experiment={"trials": 2})
    df = ablate(cfg, out_dir=str(tmp_path), workers=1, f_plots=False)
    assert len(df) == len(ABLATION_MATRIX)
    assert (tmp_path / "ablate.csv").exists()


def test_mismatch_study_without_mismatch(gain_cfg, tmp_path):
    cfg = _small(gain_cfg, pi_star=0.5, experiment={"modes": ["passive"]})
    df = run_mismatch_study(cfg, out_dir=str(tmp_path), workers=1)
    assert list(df["mode"]) == ["active"]
    assert list(df["delta"]) == [0.0]
    assert list(df["mismatch"]) == [True]
    assert (tmp_path / "mismatch.csv").exists()


def test_compare_and_plots(example1_cfg, tmp_path):
    results = compare(example1_cfg(), trial=0, seed=0, out_dir=str(tmp_path), f_plots=True)
    assert set(results) == {"passive", "active"}
    assert results["passive"].decision.is_null
    assert not results["active"].decision.is_null
    assert (tmp_path / "compare.png").exists()
    assert (tmp_path / "compare_active.jsonl").exists()


def test_plot_helpers(gain_cfg, tmp_path):
    cfg = gain_cfg()
    res, _ = run_single(cfg, point_from_config(cfg), trial=0)
    path = plot_compare({"passive": res.trace}, ["gain_1", "gain_5"], str(tmp_path / "one.png"))
    assert os.path.exists(path)
    df = run_sweep(_small(gain_cfg, experiment={"trials": 2}), out_dir=str(tmp_path / "s"), workers=1,
                   f_plots=False)
    paths = plot_sweep(df, str(tmp_path / "s" / "p"))
    assert all(os.path.exists(p) for p in paths)


def test_diagnose_writes_report(example1_cfg, tmp_path):
    out = diagnose(example1_cfg(), N=5, trials=5, out_dir=str(tmp_path))
    assert out["truth"] == "h_star"
    assert out["fundamentally_limited"]
    assert (tmp_path / "diagnose.json").exists()
    rows = read_jsonl(str(tmp_path / "diagnose_per_k.jsonl"))
    assert len(rows) == 1 + len(out["ks"])


# -------------------------------------------------
# Command line

def _write_cfg(cfg, tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg.to_dict()))
    return str(path)


def test_main_run(gain_cfg, tmp_path, capsys):
    path = _write_cfg(gain_cfg(), tmp_path)
    out = str(tmp_path / "out")
    assert main(["run", "-c", path, "--mode", "active", "--trace", "--trace-filters", "--out", out]) == 0
    assert os.path.exists(os.path.join(out, "traces", "trial_0.jsonl"))
    assert os.path.exists(os.path.join(out, "filters_trial_0.csv"))
    assert "failure=" in capsys.readouterr().out


def test_main_sweep_narrows_lists(gain_cfg, tmp_path):
    cfg = gain_cfg(experiment={"trials": 2, "N_list": [5, 10], "modes": ["passive", "active"], "workers": 1})
    path = _write_cfg(cfg, tmp_path)
    out = str(tmp_path / "out")
    assert main(["sweep", "-c", path, "--N", "5", "--mode", "passive", "--out", out]) == 0
    assert len(read_jsonl(os.path.join(out, "log.jsonl"))) == 2


def test_main_reports_config_errors(gain_cfg, tmp_path, capsys):
    path = _write_cfg(gain_cfg(), tmp_path)
    assert main(["run", "-c", path, "--alpha", "1.5"]) == 2
    assert "error:" in capsys.readouterr().err
