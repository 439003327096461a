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

import numpy as np

from estim.ekf import FilterBank
from fid.belief import Belief, belief_update
from fid.decision import Decision
from fid.stats import REJECT, HypothesisTest
from fid.window import Window
from lib.myutil import ConfigError, SimulationBlowup
from models.control import as_control_source
from models.system import measure, step_dynamics


"""
[Note]

The identification loop, passive by default with a hook for the active
control choice:

    for k = 0 .. K
        simulate h*, observe y_k
        update every filter, push the step into I_k^N
        if I_k^N is full
            reject hypotheses that fail the chi-square test
            Bayes update with renormalization
            stop with m^ID = argmax b_k when max b_k > b_th
        choose u_k (nominal policy, or the active design)
    NULL when K runs out
"""


# -------------------------------------------------
# Config

class FidConfig(object):
    def __init__(self, N=10, K=200, alpha=0.05, b_th=0.95, f_renorm=True, f_reject=True,
                 b0=None, f_joseph=False, trace_cap=1e6, chi2_cap=1e3):
        self.N = N
        self.K = K
        self.alpha = alpha
        self.b_th = b_th
        self.f_renorm = f_renorm
        self.f_reject = f_reject
        self.b0 = b0
        self.f_joseph = f_joseph
        self.trace_cap = trace_cap
        self.chi2_cap = chi2_cap

    @staticmethod
    def from_config(cfg, **kwargs):
        """From a ScenarioConfig; keyword arguments that are not None win."""
        fcfg = FidConfig(N=cfg.fid["N"], K=cfg.horizon, alpha=cfg.fid["alpha"], b_th=cfg.fid["b_th"],
                         f_renorm=cfg.fid["renorm"], f_reject=cfg.fid["reject"], b0=cfg.fid["b0"],
                         f_joseph=cfg.fid["joseph"], trace_cap=cfg.divergence["trace_cap"],
                         chi2_cap=cfg.divergence["chi2_cap"])
        for key, val in kwargs.items():
            if val is not None:
                if not hasattr(fcfg, key):
                    raise ConfigError("Unknown FID setting {}".format(key))
                setattr(fcfg, key, val)
        return fcfg

    def validate(self, n_hyp):
        if int(self.N) != self.N or self.N < 1:
            raise ConfigError("N must be an integer >= 1, got {}".format(self.N))
        if int(self.K) != self.K or self.K < 0:
            raise ConfigError("K must be a nonnegative integer, got {}".format(self.K))
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError("alpha must lie in (0, 1), got {}".format(self.alpha))
        if not 1.0 / n_hyp - 1e-12 <= self.b_th <= 1.0:
            raise ConfigError("b_th must lie in [1/|M|, 1] = [{}, 1], got {}".format(1.0 / n_hyp, self.b_th))

    def to_dict(self):
        return dict(self.__dict__)


# -------------------------------------------------
# Results

class FidResult(object):
    def __init__(self, decision, trace, diverged_steps, rejections, renorms):
        self.decision = decision
        self.trace = trace
        self.diverged_steps = diverged_steps
        self.rejections = rejections        # per hypothesis, number of steps rejected
        self.renorms = renorms


def _step_record(k, x, u, y, belief, rejected, upd, live, info):
    rec = {"k": k,
           "x_true": [float(v) for v in x],
           "y": [float(v) for v in y],
           "u": None if u is None else [float(v) for v in u],
           "belief": belief.tolist(),
           "rejected": [int(i) for i in np.flatnonzero(rejected)],
           "renormalized": bool(upd is not None and upd.renormalized),
           "survivor_reset": bool(upd is not None and upd.survivor_reset),
           "live": [bool(v) for v in live]}
    rec.update(info)
    return rec


def passive_control(policy):
    def control_fn(k, y, bank, mask):
        return np.asarray(policy(k, y), dtype=float), {}
    return control_fn


def run_fid(scenario, fcfg, rng, control_fn, x0=None, f_noise=True, f_trace=True, tracer=None):
    """
    Runs one identification episode on scenario.h_star.

    control_fn(k, y_k, bank, live_mask) -> (u_k, info dict for the trace).
    x0 overrides the initial state draw x0 ~ N(x0_hat, Sigma0).
    """
    M = scenario.M
    fcfg.validate(len(M))
    h_star = scenario.h_star
    test = HypothesisTest(fcfg.N, M.ny, fcfg.alpha)
    bank = FilterBank(M, scenario.x0_mean, scenario.Sigma0, trace_cap=fcfg.trace_cap,
                      chi2_cap=fcfg.chi2_cap, stat_window=fcfg.N, f_joseph=fcfg.f_joseph, tracer=tracer)
    window = Window(fcfg.N, len(M))
    belief = Belief.initial(len(M), fcfg.b0)

    if x0 is None:
        x = rng.multivariate_normal(scenario.x0_mean, scenario.Sigma0) if f_noise else scenario.x0_mean.copy()
    else:
        x = np.asarray(x0, dtype=float).copy()

    trace = []
    rejections = np.zeros(len(M), dtype=int)
    renorms = 0
    u_prev = None
    for k in range(int(fcfg.K) + 1):
        if k > 0:
            x = step_dynamics(h_star, x, u_prev, rng, f_noise)
        if not np.all(np.isfinite(x)) or np.max(np.abs(x)) > 1e12:
            raise SimulationBlowup("True state blew up at k={}: {}".format(k, x))
        y = measure(h_star, x, rng, f_noise)
        bank.step(u_prev, y)
        window.push(k, u_prev, y, bank.states)

        rejected = np.zeros(len(M), dtype=bool)
        upd = None
        if window.full:
            ll = window.log_likelihoods()
            rejected = ~np.isfinite(ll)
            if fcfg.f_reject:
                for i in range(len(M)):
                    if not rejected[i] and test(window.chi_bar(i)) == REJECT:
                        rejected[i] = True
                ll = np.where(rejected, -np.inf, ll)
            rejections += rejected
            upd = belief_update(belief, ll, fcfg.f_renorm)
            belief = upd.belief
            renorms += int(upd.renormalized)

        live = bank.live & ~rejected
        if upd is not None and belief.max() > fcfg.b_th:
            decision = Decision.identified(belief.argmax(), M, k, belief)
            if f_trace:
                trace.append(_step_record(k, x, None, y, belief, rejected, upd, live, {}))
            return FidResult(decision, trace, bank.diverged_steps, rejections, renorms)

        u, info = control_fn(k, y, bank, live)
        if f_trace:
            trace.append(_step_record(k, x, u, y, belief, rejected, upd, live, info))
        u_prev = u

    return FidResult(Decision.null(int(fcfg.K), belief), trace, bank.diverged_steps, rejections, renorms)


def passive_fid_run(scenario, fcfg, rng, control=None, x0=None, f_noise=True, f_trace=True, tracer=None):
    """Identification under the scenario's nominal policy or a given control source."""
    policy = scenario.policy if control is None else as_control_source(control, scenario.M.nu)
    return run_fid(scenario, fcfg, rng, passive_control(policy), x0=x0, f_noise=f_noise, f_trace=f_trace,
                   tracer=tracer)
