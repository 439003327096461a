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

from collections import deque

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from lib.myutil import (DivergenceError, InputError, LinearizationError, ModelEvalError,
                        as_vec, symmetrize)
from models.system import jac_meas, linearize


"""
[Note]

Extended Kalman filter, one per hypothesis.

Predict (u given):
    x_{k|k-1} = F_m(x_{k-1}, u_{k-1})
    P_{k|k-1} = phi P_{k-1} phi^T + Q
    y_{k|k-1} = G(x_{k|k-1}),  S = H P_{k|k-1} H^T + R,  K = P_{k|k-1} H^T S^-1
Update:
    e = y - y_{k|k-1},  x_k = x_{k|k-1} + K e,  P_k = (I - K H) P_{k|k-1}

At k = 0 there is no control yet: predict(fs, model, None) carries the prior
through unchanged so the first measurement is a pure update.
"""


# -------------------------------------------------
# Filter state

class FilterState(object):
    def __init__(self, x, P, y_pred=None, e=None, S=None, stat=None, diverged=False):
        self.x = x
        self.P = P
        self.y_pred = y_pred
        self.e = e
        self.S = S
        self.stat = stat
        self.diverged = diverged

    def copy(self):
        return FilterState(self.x.copy(), self.P.copy(), self.y_pred, self.e, self.S, self.stat, self.diverged)

    def __repr__(self):
        return "FilterState(x={}, tr(P)={}, diverged={})".format(self.x, np.trace(self.P), self.diverged)


class PredictedState(object):
    def __init__(self, x_pred, P_pred, y_pred, S, K, H, S_cho):
        self.x_pred = x_pred
        self.P_pred = P_pred
        self.y_pred = y_pred
        self.S = S
        self.K = K
        self.H = H
        self.S_cho = S_cho


def _cho(S):
    if not np.all(np.isfinite(S)):
        raise DivergenceError("Non-finite innovation covariance")
    try:
        return cho_factor(S, lower=True)
    except (LinAlgError, ValueError) as e:
        raise DivergenceError("Innovation covariance is not positive definite: {}".format(e))


def _predict(fs, model, u):
    try:
        if u is None:
            x_pred = fs.x.copy()
            P_pred = fs.P.copy()
            H = jac_meas(model, x_pred)
        else:
            phi, H = linearize(model, fs.x, u)
            x_pred = model.dyn(fs.x, u)
            P_pred = symmetrize(phi @ fs.P @ phi.T + model.Q)
        y_pred = model.meas(x_pred)
    except (ModelEvalError, LinearizationError) as e:
        raise DivergenceError(e.msg)

    S = symmetrize(H @ P_pred @ H.T + model.R)
    S_cho = _cho(S)
    K = cho_solve(S_cho, H @ P_pred).T
    if not (np.all(np.isfinite(x_pred)) and np.all(np.isfinite(P_pred)) and np.all(np.isfinite(K))):
        raise DivergenceError("Non-finite prediction for {}".format(model.label))
    return PredictedState(x_pred, P_pred, y_pred, S, K, H, S_cho)


def predict(fs, model, u, f_mark=True):
    """
    Time update under u. A failure raises DivergenceError and, with f_mark,
    sets fs.diverged; candidate scoring passes f_mark=False.
    """
    if fs.diverged:
        raise DivergenceError("Predict called on a diverged filter for {}".format(model.label))
    try:
        return _predict(fs, model, u)
    except DivergenceError:
        if f_mark:
            fs.diverged = True
        raise


def update(ps, y, f_joseph=False, R=None):
    """
    Measurement update. The Joseph form needs R; the default is the plain
    (I - K H) P form.
    """
    y = as_vec(y, ps.y_pred.shape[0], "measurement")
    if not np.all(np.isfinite(y)):
        raise InputError("Non-finite measurement {}".format(y))
    e = y - ps.y_pred
    x = ps.x_pred + ps.K @ e
    IKH = np.eye(ps.x_pred.shape[0]) - ps.K @ ps.H
    if f_joseph:
        P = IKH @ ps.P_pred @ IKH.T + ps.K @ R @ ps.K.T
    else:
        P = IKH @ ps.P_pred
    P = symmetrize(P)
    stat = innovation_stat(e, ps.S_cho)
    return FilterState(x, P, ps.y_pred, e, ps.S, stat)


def innovation_stat(e, S):
    """e^T S^-1 e. S is a matrix or a cho_factor result."""
    S_cho = S if isinstance(S, tuple) else _cho(np.atleast_2d(np.asarray(S, dtype=float)))
    e = np.asarray(e, dtype=float).reshape(-1)
    return float(e @ cho_solve(S_cho, e))


def check_divergence(fs, window_stats, trace_cap=1e6, chi2_cap=1e3):
    """Sticky: once a filter is flagged it stays diverged."""
    if fs.diverged:
        return True
    bad = (not np.all(np.isfinite(fs.x)) or not np.all(np.isfinite(fs.P)) or
           np.trace(fs.P) > trace_cap)
    stats = list(window_stats)
    if not bad and stats:
        bad = not np.all(np.isfinite(stats)) or np.mean(stats) > chi2_cap
    if bad:
        fs.diverged = True
    return fs.diverged


# -------------------------------------------------
# Filter bank

class FilterBank(object):
    """
    One EKF per hypothesis, all fed the same (u_{k-1}, y_k) stream. A filter
    that fails (Cholesky, non-finite values, caps) is marked diverged and
    skipped from then on.
    """
    def __init__(self, M, x0_mean, Sigma0, trace_cap=1e6, chi2_cap=1e3, stat_window=10,
                 f_joseph=False, tracer=None):
        self.M = M
        self.trace_cap = trace_cap
        self.chi2_cap = chi2_cap
        self.f_joseph = f_joseph
        self.tracer = tracer
        x0 = as_vec(x0_mean, M.nx, "x0_mean")
        self.states = [FilterState(x0.copy(), np.array(Sigma0, dtype=float)) for _ in M]
        self.recent = [deque(maxlen=stat_window) for _ in M]
        self.diverged_steps = 0
        self.k = -1

    def __len__(self):
        return len(self.states)

    @property
    def live(self):
        return np.array([not fs.diverged for fs in self.states])

    def step(self, u_prev, y):
        """
        Absorb y_k (after predicting with u_{k-1}; None at k = 0). Returns the
        list of new filter states; a diverged filter keeps its last state.
        """
        self.k += 1
        y = np.asarray(y, dtype=float).reshape(-1)
        if not np.all(np.isfinite(y)):
            raise InputError("Non-finite measurement at k={}".format(self.k))
        for i, model in enumerate(self.M):
            fs = self.states[i]
            if fs.diverged:
                self.diverged_steps += 1
                continue
            try:
                new = update(predict(fs, model, u_prev), y, self.f_joseph, model.R)
            except DivergenceError:
                fs.diverged = True
                self.diverged_steps += 1
                continue
            self.recent[i].append(new.stat)
            check_divergence(new, self.recent[i], self.trace_cap, self.chi2_cap)
            self.states[i] = new
            if self.tracer is not None:
                self.tracer.record(self.k, model.label, new)
        return self.states

    def predict_all(self, u, mask=None):
        """
        Prediction of every filter under candidate u without changing the bank.
        None for diverged filters and for those masked out.
        """
        out = []
        for i, model in enumerate(self.M):
            fs = self.states[i]
            if fs.diverged or (mask is not None and not mask[i]):
                out.append(None)
                continue
            try:
                out.append(predict(fs, model, u, f_mark=False))
            except DivergenceError:
                out.append(None)
        return out
