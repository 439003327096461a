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

from diag.diagnosability import (estimate_lambda, estimate_lambda_bar, is_fundamentally_limited,
                                 lambda_bar_growth)
from harness.monte_carlo import ExperimentConfig
from harness.plots import plot_compare
from harness.trial import SweepPoint, run_trial, write_trace
from harness.utils import ResultLogger, mkdir_p
from models.scenario import build_scenario


"""
[Note]

Single-trial commands: run, compare and diagnose.
"""


def point_from_config(cfg, mode="passive", N=None, authority_scale=None):
    exp = ExperimentConfig(cfg)
    return SweepPoint(mode=mode, N=cfg.fid["N"] if N is None else N, noise_scale=cfg.noise_scale,
                      f_renorm=cfg.fid["renorm"], f_reject=cfg.fid["reject"], alpha=cfg.fid["alpha"],
                      authority_scale=exp.authority_list[0] if authority_scale is None else authority_scale)


def run_single(cfg, point, trial=0, seed=None, truth=None, out_dir=None, tracer=None):
    """One trial; writes its trace under out_dir/traces when out_dir is given."""
    seed = ExperimentConfig(cfg).seed if seed is None else seed
    result = run_trial(cfg, point, trial, master_seed=seed, truth=truth, f_trace=True, tracer=tracer)
    path = None
    if out_dir is not None:
        trace_dir = mkdir_p(os.path.join(out_dir, "traces"))
        path = os.path.join(trace_dir, "trial_{}.jsonl".format(trial))
        write_trace(path, result, result.trace, point=point.to_dict(), seed=seed)
    return result, path


def compare(cfg, N=None, trial=0, seed=None, truth=None, out_dir=None, f_plots=True):
    """Passive and active FID on the same trial seed."""
    results = {}
    for mode in ["passive", "active"]:
        point = point_from_config(cfg, mode=mode, N=N)
        results[mode], _ = run_single(cfg, point, trial=trial, seed=seed, truth=truth)
    if out_dir is not None:
        out_dir = mkdir_p(out_dir)
        for mode, res in results.items():
            write_trace(os.path.join(out_dir, "compare_{}.jsonl".format(mode)), res, res.trace,
                        mode=mode, seed=seed)
        if f_plots:
            labels = build_scenario(cfg.scenario, cfg).M.labels
            plot_compare({mode: res.trace for mode, res in results.items()}, labels,
                         os.path.join(out_dir, "compare.png"))
    return results


def diagnose(cfg, N=None, truth=None, control=None, trials=None, seed=None, out_dir=None):
    """
    Diagnosability report under the nominal policy (or a given control
    source). A truth in M gives lambda^N; an unmodeled truth gives lambda_bar^N
    and its growth over the experiment's N list.
    """
    exp = ExperimentConfig(cfg)
    N = cfg.fid["N"] if N is None else N
    trials = exp.diag_trials if trials is None else trials
    rng = np.random.default_rng(exp.seed if seed is None else seed)
    scenario = build_scenario(cfg.scenario, cfg, truth=0 if truth is None else truth)

    if scenario.truth_in_M:
        report = estimate_lambda(scenario, scenario.truth_index, control=control, N=N, trials=trials, rng=rng)
        out = report.to_dict()
        out["fundamentally_limited"] = is_fundamentally_limited(report)
    else:
        report = estimate_lambda_bar(scenario, control=control, N=N, trials=trials, rng=rng)
        out = report.to_dict()
        growth = lambda_bar_growth(scenario, exp.N_list, control=control, trials=trials, rng=rng)
        out["growth"] = [{"N": r.N, "lambda_bar": r.lambda_min, "stderr": r.stderr} for r in growth]
    out["truth"] = scenario.truth_label

    if out_dir is not None:
        out_dir = mkdir_p(out_dir)
        with open(os.path.join(out_dir, "diagnose.json"), 'w') as f:
            json.dump(out, f, indent=2)
        with ResultLogger(os.path.join(out_dir, "diagnose_per_k.jsonl"), truth=out["truth"], N=N) as logger:
            for k, lam in zip(report.ks, report.lambda_per_k):
                logger.log(k=k, lam=float(lam))
    return out
