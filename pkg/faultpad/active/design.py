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

import itertools

import numpy as np
from scipy.linalg import cho_solve

from estim.ekf import PredictedState, predict
from fid.engine import run_fid
from lib.myutil import DivergenceError, ModelEvalError


"""
[Note]

Active input design. For a candidate u every live filter predicts
f_m(u) = N(y_{m,k+1|k}(u), S_m(u)) and the candidates are scored by the
geometric mean of the ordered pairwise separations

    d(f_m, f_m') = (y_m - y_m')^T S_m'^-1 (y_m - y_m')
    J(u) = (prod_{m != m'} d(f_m, f_m'))^(1/|M|^2)

computed in log space. Rejected and diverged hypotheses are left out, and |M|
counts the live ones.
"""


TIE_RTOL = 1e-9


class DesignConfig(object):
    def __init__(self, grid_per_axis=9, refine_iters=1, exponent=None, f_frozen_cov=False):
        self.grid_per_axis = grid_per_axis
        self.refine_iters = refine_iters
        self.exponent = exponent
        self.f_frozen_cov = f_frozen_cov

    @staticmethod
    def from_config(cfg, **kwargs):
        d = cfg.design
        dcfg = DesignConfig(d["grid_per_axis"], d["refine_iters"], d["exponent"], d["frozen_cov"])
        for key, val in kwargs.items():
            if val is not None:
                setattr(dcfg, key, val)
        return dcfg


# -------------------------------------------------
# Predicted measurement distributions

class PredictedMeasurementSet(object):
    """Predicted (y, S) of the live hypotheses under one candidate control."""
    def __init__(self, u, indices, preds):
        self.u = u
        self.indices = indices
        self.preds = preds

    def __len__(self):
        return len(self.preds)

    @staticmethod
    def from_bank(bank, u, mask=None, frozen=None):
        """
        frozen: optional per-hypothesis PredictedState whose covariances are
        reused, so only the mean is propagated under u.
        """
        indices, preds = [], []
        for i, model in enumerate(bank.M):
            fs = bank.states[i]
            if fs.diverged or (mask is not None and not mask[i]):
                continue
            try:
                if frozen is not None and frozen[i] is not None:
                    ref = frozen[i]
                    x_pred = model.dyn(fs.x, u)
                    ps = PredictedState(x_pred, ref.P_pred, model.meas(x_pred), ref.S, ref.K, ref.H, ref.S_cho)
                else:
                    ps = predict(fs, model, u, f_mark=False)
            except (DivergenceError, ModelEvalError):
                continue
            indices.append(i)
            preds.append(ps)
        return PredictedMeasurementSet(u, indices, preds)


def _mean_cov(f):
    if isinstance(f, PredictedState):
        return f.y_pred, f.S_cho
    y, S = f
    return np.asarray(y, dtype=float).reshape(-1), np.atleast_2d(np.asarray(S, dtype=float))


def pairwise_distance(f_m, f_m2):
    """d(f_m, f_m') with the covariance of f_m'; asymmetric in its arguments."""
    y1, _ = _mean_cov(f_m)
    y2, S2 = _mean_cov(f_m2)
    gap = y1 - y2
    if isinstance(S2, tuple):
        return float(gap @ cho_solve(S2, gap))
    return float(gap @ np.linalg.solve(S2, gap))


def log_separation(pms):
    """sum over ordered pairs of log d; -inf when some pair coincides."""
    if len(pms) < 2:
        raise DivergenceError("Objective needs at least 2 live hypotheses, got {}".format(len(pms)))
    total = 0.0
    for a, b in itertools.permutations(pms.preds, 2):
        d = pairwise_distance(a, b)
        if not d > 0.0:
            return -np.inf
        total += np.log(d)
    return total


def objective_from_set(pms, exponent=None):
    """J of a PredictedMeasurementSet; exponent defaults to 1/|live|^2."""
    sumlog = log_separation(pms)
    if sumlog == -np.inf:
        return 0.0
    exponent = 1.0 / len(pms) ** 2 if exponent is None else exponent
    return float(np.exp(exponent * sumlog))


def objective_J(u, bank, mask=None, exponent=None, frozen=None):
    pms = PredictedMeasurementSet.from_bank(bank, np.asarray(u, dtype=float), mask, frozen)
    return objective_from_set(pms, exponent)


# -------------------------------------------------
# Control selection

class ControlChoice(object):
    def __init__(self, u, J, informative, evaluated):
        self.u = u
        self.J = J
        self.informative = informative
        self.evaluated = evaluated

    def __repr__(self):
        return "ControlChoice(u={}, J={:.4g}, informative={})".format(self.u, self.J, self.informative)


def _tied(a, b):
    if not (np.isfinite(a) and np.isfinite(b)):
        return a == b
    return abs(a - b) <= TIE_RTOL * max(1.0, abs(a), abs(b))


def _better(cand, best):
    """Rank on sum log d (-inf below any finite score), then smaller norm, then earlier index."""
    (s1, n1, i1), (s2, n2, i2) = cand, best
    if (s1 == -np.inf) != (s2 == -np.inf):
        return s2 == -np.inf
    if s1 == -np.inf:
        return (n1, i1) < (n2, i2)
    if not _tied(s1, s2):
        return s1 > s2
    if not _tied(n1, n2):
        return n1 < n2
    return i1 < i2


def _reference_predictions(bank, mask, u_ref):
    out = []
    for i, model in enumerate(bank.M):
        fs = bank.states[i]
        if fs.diverged or (mask is not None and not mask[i]):
            out.append(None)
            continue
        try:
            out.append(predict(fs, model, u_ref, f_mark=False))
        except DivergenceError:
            out.append(None)
    return out


def select_control(bank, U_a, dcfg=None, mask=None, nominal=None):
    """
    argmax_u J(u) over a grid of U_a plus local refinement. Falls back to the
    nominal control, flagged non-informative, when fewer than 2 hypotheses
    are live or J vanishes on every candidate.
    """
    dcfg = dcfg or DesignConfig()
    nominal = U_a.clip(U_a.grid(1)[0] if nominal is None else nominal)
    frozen = _reference_predictions(bank, mask, nominal) if dcfg.f_frozen_cov else None

    def score(u):
        return log_separation(PredictedMeasurementSet.from_bank(bank, u, mask, frozen))

    cands = U_a.grid(dcfg.grid_per_axis)
    try:
        keyed = [(score(u), float(np.linalg.norm(u)), idx) for idx, u in enumerate(cands)]
    except DivergenceError:
        return ControlChoice(nominal, 0.0, False, 0)
    best = keyed[0]
    for cand in keyed[1:]:
        if _better(cand, best):
            best = cand
    u_best = cands[best[2]]
    evaluated = len(cands)

    if best[0] > -np.inf:
        step = U_a.spacing(dcfg.grid_per_axis)
        for it in range(dcfg.refine_iters):
            step = 0.5 * step
            offsets = itertools.product(*[(-s, 0.0, s) for s in step])
            local = np.unique(np.array([U_a.clip(u_best + np.array(o)) for o in offsets]), axis=0)
            for u in local:
                s = score(u)
                evaluated += 1
                if s > best[0] and not _tied(s, best[0]):
                    best = (s, float(np.linalg.norm(u)), best[2])
                    u_best = u

    if best[0] == -np.inf:
        return ControlChoice(nominal, 0.0, False, evaluated)
    n_live = len(PredictedMeasurementSet.from_bank(bank, u_best, mask, frozen))
    exponent = 1.0 / n_live ** 2 if dcfg.exponent is None else dcfg.exponent
    return ControlChoice(np.array(u_best, dtype=float), float(np.exp(exponent * best[0])), True, evaluated)


def is_degenerate(U_a, bank, samples=9, mask=None):
    """Sampled check that J is constant over U_a (within 1e-9 relative)."""
    cands = U_a.grid(samples)
    if len(cands) < 2:
        return True
    try:
        js = np.array([objective_J(u, bank, mask=mask) for u in cands])
    except DivergenceError:
        return True
    return bool(np.max(js) - np.min(js) <= 1e-9 * max(np.max(np.abs(js)), 1e-300))


# -------------------------------------------------
# Active loop

def active_control(scenario, dcfg):
    U_a = scenario.U_a

    def control_fn(k, y, bank, mask):
        nominal = U_a.clip(scenario.policy(k, y))
        choice = select_control(bank, U_a, dcfg, mask=mask, nominal=nominal)
        return choice.u, {"J": choice.J, "informative": choice.informative}
    return control_fn


def active_fid_run(scenario, fcfg, rng, dcfg=None, x0=None, f_noise=True, f_trace=True, tracer=None):
    """Identification with u_k = argmax J chosen after every belief update."""
    return run_fid(scenario, fcfg, rng, active_control(scenario, dcfg or DesignConfig()),
                   x0=x0, f_noise=f_noise, f_trace=f_trace, tracer=tracer)
