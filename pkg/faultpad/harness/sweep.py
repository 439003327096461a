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

import pandas as pd
from tqdm import tqdm

from harness.monte_carlo import ExperimentConfig, run_monte_carlo
from harness.plots import plot_sweep
from harness.utils import ResultLogger, Timer, cpu_stats, curr_timestamp, default_workers, mkdir_p


"""
[Note]

Sweeps over the experiment grid (mode x ablation x authority x noise x N).

results/<name>/
    <tag>.csv        one row per sweep point
    summary.json     config and rows
    log.jsonl        one line per finished point, with timings
    traces/point_<i>/ per-trial JSON lines traces of sweep point i (optional)
"""


ABLATION_MATRIX = [
    {"renorm": True, "reject": True, "alpha": 0.05},
    {"renorm": False, "reject": True, "alpha": 0.05},
    {"renorm": False, "reject": True, "alpha": 0.1},
    {"renorm": False, "reject": False, "alpha": 0.05},
]


def _setup(cfg, out_dir, workers, f_verbose):
    exp = ExperimentConfig(cfg)
    out_dir = mkdir_p(out_dir or os.path.join("results", exp.name))
    if workers is None:
        workers = exp.workers or default_workers()
    if f_verbose:
        cpu_stats()
    return exp, out_dir, workers


def _objective_cov(cfg):
    return "nominal" if cfg.design["frozen_cov"] else "candidate"


def _write_table(rows, cfg, out_dir, tag):
    for row in rows:
        row["objective_cov"] = _objective_cov(cfg)
    df = pd.DataFrame(rows)
    df.to_csv(os.path.join(out_dir, "{}.csv".format(tag)), index=False)
    with open(os.path.join(out_dir, "summary.json"), 'w') as f:
        json.dump({"tag": tag, "timestamp": curr_timestamp(), "objective_cov": _objective_cov(cfg),
                   "config": cfg.to_dict(), "points": rows},
                  f, indent=2, default=str)
    return df


def run_sweep(cfg, out_dir=None, workers=None, f_verbose=False, f_plots=None, f_traces=False, tag="sweep"):
    exp, out_dir, workers = _setup(cfg, out_dir, workers, f_verbose)
    rows = []
    with ResultLogger(os.path.join(out_dir, "log.jsonl"), tag=tag, timestamp=curr_timestamp(),
                      **cfg.to_dict()) as logger:
        for i, point in enumerate(exp.points()):
            trace_dir = mkdir_p(os.path.join(out_dir, "traces", "point_{}".format(i))) if f_traces else None
            with Timer() as timer:
                metrics, _ = run_monte_carlo(cfg, point, workers=workers, f_verbose=f_verbose, trace_dir=trace_dir)
            row = metrics.to_row()
            row["seconds"] = timer.interval
            logger.log(**row)
            rows.append(row)
            if f_verbose:
                tqdm.write("{}  ({:.1f}s)".format(metrics, timer.interval))

    df = _write_table(rows, cfg, out_dir, tag)
    if exp.f_plots if f_plots is None else f_plots:
        plot_sweep(df, os.path.join(out_dir, tag))
    return df


def ablate(cfg, out_dir=None, workers=None, f_verbose=False, f_plots=None):
    """Preset ablation matrix: full, no renormalization (alpha 0.05 and 0.1), neither step."""
    cfg = cfg.override(**{"experiment.ablations": ABLATION_MATRIX})
    return run_sweep(cfg, out_dir=out_dir, workers=workers, f_verbose=f_verbose, f_plots=f_plots, tag="ablate")


def run_mismatch_study(cfg, out_dir=None, workers=None, f_verbose=False):
    """
    Active FID with the true system's parameters perturbed by the mismatch
    knobs, against the matched baseline on the same trial seeds.
    """
    cfg = cfg.override(**{"experiment.modes": ["active"]})
    exp, out_dir, workers = _setup(cfg, out_dir, workers, f_verbose)

    rows = []
    with ResultLogger(os.path.join(out_dir, "log.jsonl"), tag="mismatch", timestamp=curr_timestamp(),
                      **cfg.to_dict()) as logger:
        for point in exp.points():
            with Timer() as timer:
                base, _ = run_monte_carlo(cfg, point, workers=workers, f_verbose=f_verbose)
                point.f_mismatch = True
                mism, _ = run_monte_carlo(cfg, point, workers=workers, f_verbose=f_verbose)
            row = mism.to_row()
            row.update({"param_dev": exp.mismatch["param_dev"],
                        "disturbance": exp.mismatch["disturbance"],
                        "baseline_failure_rate": base.failure_rate,
                        "baseline_stderr": base.stderr,
                        "delta": mism.failure_rate - base.failure_rate,
                        "seconds": timer.interval})
            logger.log(**row)
            rows.append(row)
            if f_verbose:
                tqdm.write("{} -> delta {:+.3f}".format(point, row["delta"]))
    return _write_table(rows, cfg, out_dir, "mismatch")
