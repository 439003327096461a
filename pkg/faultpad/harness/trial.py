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

import os

import numpy as np

from active.design import DesignConfig, active_fid_run
from fid.decision import failure_indicator
from fid.engine import FidConfig, passive_fid_run
from harness.utils import ResultLogger
from lib.myutil import SimulationBlowup, SweepAbort
from models.scenario import build_scenario


"""
[Note]

One randomized trial: draw h* (in M w.p. pi_star), draw x0 ~ N(x0_hat, Sigma0),
simulate under the passive policy or the active loop and score the decision.

Every trial draws from its own Philox stream keyed by
(master seed, trial index, attempt), so results do not depend on which worker
runs the trial or in which order.
"""


MAX_ATTEMPTS = 3


class SweepPoint(object):
    """One configuration of the experiment grid."""
    def __init__(self, mode="passive", N=10, noise_scale=1.0, f_renorm=True, f_reject=True, alpha=0.05,
                 authority_scale=1.0, f_mismatch=False):
        self.mode = mode
        self.N = int(N)
        self.noise_scale = float(noise_scale)
        self.f_renorm = bool(f_renorm)
        self.f_reject = bool(f_reject)
        self.alpha = float(alpha)
        self.authority_scale = float(authority_scale)
        self.f_mismatch = bool(f_mismatch)

    def to_dict(self):
        return {"mode": self.mode, "N": self.N, "noise": self.noise_scale, "renorm": self.f_renorm,
                "reject": self.f_reject, "alpha": self.alpha, "authority": self.authority_scale,
                "mismatch": self.f_mismatch}

    def __repr__(self):
        return "SweepPoint({})".format(self.to_dict())


class TrialResult(object):
    def __init__(self, trial, attempt, decision, failure, truth, truth_in_M, diverged_steps, trace=None):
        self.trial = trial
        self.attempt = attempt
        self.decision = decision
        self.failure = failure
        self.truth = truth
        self.truth_in_M = truth_in_M
        self.diverged_steps = diverged_steps
        self.trace = trace

    @property
    def delay(self):
        """Decision step; None for NULL."""
        return None if self.decision.is_null else self.decision.k

    def to_dict(self):
        return {"trial": self.trial, "attempt": self.attempt, "decision": self.decision.to_dict(),
                "failure": self.failure, "delay": self.delay, "truth": self.truth,
                "truth_in_M": self.truth_in_M, "diverged_steps": self.diverged_steps}


def trial_rngs(master_seed, trial, attempt=0):
    """(main, mismatch) generators of one trial attempt."""
    main = np.random.Generator(np.random.Philox(np.random.SeedSequence(master_seed, spawn_key=(trial, attempt, 0))))
    mism = np.random.Generator(np.random.Philox(np.random.SeedSequence(master_seed, spawn_key=(trial, attempt, 1))))
    return main, mism


def _run_once(cfg, point, trial, attempt, master_seed, truth, f_trace, tracer=None):
    rng, mism_rng = trial_rngs(master_seed, trial, attempt)
    scfg = cfg.override(noise_scale=point.noise_scale)
    scenario = build_scenario(scfg.scenario, scfg, rng=rng, truth=truth,
                              mismatch_rng=mism_rng if point.f_mismatch else None,
                              authority_scale=point.authority_scale)
    fcfg = FidConfig.from_config(scfg, N=point.N, alpha=point.alpha, f_renorm=point.f_renorm,
                                 f_reject=point.f_reject)
    if point.mode == "active":
        res = active_fid_run(scenario, fcfg, rng, DesignConfig.from_config(scfg), f_trace=f_trace,
                             tracer=tracer)
    else:
        res = passive_fid_run(scenario, fcfg, rng, f_trace=f_trace, tracer=tracer)
    return scenario, res


def run_trial(cfg, point, trial, master_seed=0, truth=None, f_trace=False, trace_dir=None, tracer=None):
    """
    Runs trial `trial` of a sweep point. A trial whose true state blows up is
    redrawn with the next attempt key, at most MAX_ATTEMPTS times.
    """
    for attempt in range(MAX_ATTEMPTS):
        try:
            scenario, res = _run_once(cfg, point, trial, attempt, master_seed, truth,
                                      f_trace or trace_dir is not None, tracer)
        except SimulationBlowup as e:
            last = e
            if tracer is not None:
                tracer.rows = []
            continue
        result = TrialResult(trial, attempt, res.decision,
                             failure_indicator(res.decision, scenario.h_star, scenario.M),
                             scenario.truth_label, scenario.truth_in_M, res.diverged_steps,
                             res.trace if f_trace else None)
        if trace_dir is not None:
            write_trace(os.path.join(trace_dir, "trial_{}.jsonl".format(trial)), result, res.trace,
                        point=point.to_dict(), seed=master_seed, labels=scenario.M.labels,
                        U_a=scenario.U_a.to_list())
        return result
    raise SweepAbort("Trial {} blew up {} times at {}: {}".format(trial, MAX_ATTEMPTS, point, last.msg))


def write_trace(path, result, trace, **header):
    with ResultLogger(path, trial=result.trial, attempt=result.attempt, truth=result.truth,
                      truth_in_M=result.truth_in_M, **header) as logger:
        for rec in trace:
            logger.log(**rec)
        logger.log(decision=result.decision.to_dict(), failure=result.failure)
