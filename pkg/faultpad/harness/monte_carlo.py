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

import functools
import itertools
from multiprocessing import Pool

import numpy as np
from tqdm import tqdm

from harness.trial import SweepPoint, run_trial
from lib.myhist import MyHist
from lib.myutil import ConfigError
from models.scenario import build_scenario


"""
[Note]

Monte Carlo over trials of one sweep point, and the experiment grid.
Results are reduced in trial order, so 1 worker and many workers give the
same metrics.
"""


# -------------------------------------------------
# Experiment config

class ExperimentConfig(object):
    def __init__(self, cfg):
        self.cfg = cfg
        exp = cfg.experiment
        self.scenario = cfg.scenario
        self.name = exp["name"] or cfg.scenario
        self.modes = list(exp["modes"])
        self.N_list = [int(n) for n in exp["N_list"]]
        self.noise_list = [float(s) for s in exp["noise_list"]]
        self.trials = int(exp["trials"])
        self.seed = int(exp["seed"])
        self.ablations = [dict(a) for a in exp["ablations"]]
        scales = exp["authority_scale"]
        self.authority_list = [float(s) for s in (scales if isinstance(scales, list) else [scales])]
        self.workers = exp["workers"]
        self.f_plots = bool(exp["plots"])
        self.diag_trials = int(exp["diag_trials"])
        self.pi_star = cfg.pi_star
        self.alpha = cfg.fid["alpha"]
        self.b_th = cfg.fid["b_th"]
        self.f_renorm = cfg.fid["renorm"]
        self.f_reject = cfg.fid["reject"]
        self.mismatch = dict(cfg.mismatch)

    def points(self, f_mismatch=False):
        grid = itertools.product(self.modes, self.ablations, self.authority_list, self.noise_list, self.N_list)
        for mode, abl, auth, noise, N in grid:
            yield SweepPoint(mode=mode, N=N, noise_scale=noise,
                             f_renorm=abl.get("renorm", self.f_renorm),
                             f_reject=abl.get("reject", self.f_reject),
                             alpha=abl.get("alpha", self.alpha),
                             authority_scale=auth, f_mismatch=f_mismatch)


# -------------------------------------------------
# Metrics

class Metrics(object):
    def __init__(self, point, results, labels):
        if not results:
            raise ConfigError("Metrics need at least one trial")
        self.point = point
        self.trials = len(results)
        self.failures = int(sum(r.failure for r in results))
        self.failure_rate = self.failures / self.trials
        p = self.failure_rate
        self.stderr = float(np.sqrt(p * (1.0 - p) / self.trials))

        delays = [r.delay for r in results if r.delay is not None]
        self.n_identified = len(delays)
        self.avg_delay = float(np.mean(delays)) if delays else float("nan")
        self.delay_std = float(np.std(delays)) if delays else float("nan")
        self.min_delay = int(min(delays)) if delays else None
        self.null_rate = (self.trials - self.n_identified) / self.trials

        hist = MyHist.for_labels(labels)
        self.outcomes = hist.to_dict(hist.merges([hist.delta(r.decision.label) for r in results]))

        self.n_in_M = int(sum(r.truth_in_M for r in results))
        self.failures_in_M = int(sum(r.failure for r in results if r.truth_in_M))
        self.failures_out_M = int(sum(r.failure for r in results if not r.truth_in_M))
        self.invalid_trials = int(sum(r.attempt for r in results))
        self.diverged_steps = int(sum(r.diverged_steps for r in results))

    def to_row(self):
        row = self.point.to_dict()
        row.update({"trials": self.trials,
                    "failures": self.failures,
                    "failure_rate": self.failure_rate,
                    "stderr": self.stderr,
                    "avg_delay": self.avg_delay,
                    "delay_std": self.delay_std,
                    "min_delay": self.min_delay,
                    "null_rate": self.null_rate,
                    "n_in_M": self.n_in_M,
                    "failures_in_M": self.failures_in_M,
                    "failures_out_M": self.failures_out_M,
                    "invalid_trials": self.invalid_trials,
                    "diverged_steps": self.diverged_steps})
        for label, cnt in self.outcomes.items():
            row["out_{}".format(label)] = cnt
        return row

    def __repr__(self):
        return "Metrics({} fail={:.3f}+-{:.3f} delay={:.1f} null={:.3f})".format(
            self.point, self.failure_rate, self.stderr, self.avg_delay, self.null_rate)


# -------------------------------------------------
# Monte Carlo

def _trial_worker(cfg, point, master_seed, trace_dir, trial):
    return run_trial(cfg, point, trial, master_seed=master_seed, trace_dir=trace_dir)


def run_monte_carlo(cfg, point, trials=None, master_seed=None, workers=1, f_verbose=False, trace_dir=None):
    """Returns (Metrics, trial results in trial order)."""
    exp = ExperimentConfig(cfg)
    trials = exp.trials if trials is None else int(trials)
    master_seed = exp.seed if master_seed is None else int(master_seed)
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    labels = build_scenario(cfg.scenario, cfg).M.labels

    worker = functools.partial(_trial_worker, cfg, point, master_seed, trace_dir)
    desc = "{} N={} noise={}".format(point.mode, point.N, point.noise_scale)
    if workers is None or workers <= 1:
        results = [worker(t) for t in tqdm(range(trials), desc=desc, disable=not f_verbose)]
    else:
        with Pool(workers) as pool:
            results = list(tqdm(pool.imap(worker, range(trials)), total=trials, desc=desc,
                                disable=not f_verbose))
    return Metrics(point, results, labels), results
