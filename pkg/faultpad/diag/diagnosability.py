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

import warnings

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from estim.ekf import FilterBank
from lib.myutil import ConfigError, DimensionError
from models.control import as_control_source
from models.system import measure, step_dynamics


"""
[Note]

Monte Carlo estimates of the diagnosability of M.

lambda_k^N: over rollouts of the true system h* in M, the expected window
mean of

    (y_{h*,i|i-1} - y_{m,i|i-1})^T S_{m,i}^-1 (y_{h*,i|i-1} - y_{m,i|i-1})

minimized over m != h*; lambda^N is the minimum over k >= N-1 within the
horizon, so it upper-bounds the infinite-horizon value. lambda_bar^N uses the
true measurement y_i in place of y_{h*,i|i-1} and minimizes over all of M.

Steps where a filter diverged are left out of the averages and counted in
diverged_steps.
"""


class DiagnosabilityReport(object):
    def __init__(self, N, ks, lambda_per_k, lambda_min, bottleneck_pair, stderr, diverged_steps,
                 trials, f_bar=False):
        self.N = N
        self.ks = ks
        self.lambda_per_k = lambda_per_k
        self.lambda_min = lambda_min
        self.bottleneck_pair = bottleneck_pair
        self.stderr = stderr
        self.diverged_steps = diverged_steps
        self.trials = trials
        self.f_bar = f_bar

    def to_dict(self):
        return {"N": self.N,
                "kind": "lambda_bar" if self.f_bar else "lambda",
                "ks": list(self.ks),
                "lambda_per_k": [float(v) for v in self.lambda_per_k],
                "lambda_min": float(self.lambda_min),
                "bottleneck_pair": list(self.bottleneck_pair),
                "stderr": float(self.stderr),
                "diverged_steps": int(self.diverged_steps),
                "trials": int(self.trials)}

    def __repr__(self):
        return "DiagnosabilityReport(N={}, lambda={:.4g} +- {:.2g}, pair={})".format(
            self.N, self.lambda_min, self.stderr, self.bottleneck_pair)


def _quad(gap, S):
    try:
        c = cho_factor(S, lower=True)
    except (LinAlgError, ValueError):
        return np.nan
    return float(gap @ cho_solve(c, gap))


def _child_rngs(rng, trials):
    return [np.random.default_rng(s) for s in np.random.SeedSequence(int(rng.integers(2 ** 63))).spawn(trials)]


def rollout_terms(scenario, truth_model, ref_index, control, K, trials, rng, f_noise=True):
    """
    Separation terms of every rollout, shape (trials, K+1, |M|); NaN where a
    filter diverged and at ref_index itself. ref_index None compares against
    the true measurement instead of a reference filter.
    """
    M = scenario.M
    policy = as_control_source(scenario.policy if control is None else control, M.nu)
    if truth_model.ny != M.ny or truth_model.nx != M.nx:
        raise DimensionError("True model does not match the dimensions of M")
    terms = np.full((trials, K + 1, len(M)), np.nan)
    diverged = 0
    for t, trng in enumerate(_child_rngs(rng, trials)):
        bank = FilterBank(M, scenario.x0_mean, scenario.Sigma0)
        x = trng.multivariate_normal(scenario.x0_mean, scenario.Sigma0) if f_noise else scenario.x0_mean.copy()
        u_prev = None
        for k in range(K + 1):
            if k > 0:
                x = step_dynamics(truth_model, x, u_prev, trng, f_noise)
            y = measure(truth_model, x, trng, f_noise)
            states = bank.step(u_prev, y)
            if ref_index is None:
                ref = y
            elif states[ref_index].diverged:
                ref = None
            else:
                ref = states[ref_index].y_pred
            for i, fs in enumerate(states):
                if i == ref_index:
                    continue
                if fs.diverged or ref is None:
                    diverged += 1
                    continue
                terms[t, k, i] = _quad(ref - fs.y_pred, fs.S)
            u_prev = np.asarray(policy(k, y), dtype=float)
    return terms, diverged


def report_from_terms(terms, N, labels, ref_label, diverged=0, f_bar=False):
    trials, steps, n_hyp = terms.shape
    if steps < N:
        raise ConfigError("Horizon too short for window N={}: need K >= N-1".format(N))
    # window means, shape (trials, steps - N + 1, |M|)
    win = sliding_window_view(terms, N, axis=1).mean(axis=-1)
    with np.errstate(invalid='ignore'):
        counts = np.sum(~np.isnan(win), axis=0)
        mean = np.where(counts > 0, np.nansum(win, axis=0) / np.maximum(counts, 1), np.nan)
    if np.all(np.isnan(mean)):
        raise ConfigError("No valid separation terms: every filter diverged or M has one member")

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        per_k = np.nanmin(mean, axis=1)
    kdx = int(np.nanargmin(per_k))
    mdx = int(np.nanargmin(mean[kdx]))
    vals = win[:, kdx, mdx]
    vals = vals[~np.isnan(vals)]
    stderr = float(np.std(vals, ddof=1) / np.sqrt(vals.shape[0])) if vals.shape[0] > 1 else 0.0
    ks = list(range(N - 1, steps))
    return DiagnosabilityReport(N, ks, per_k, float(per_k[kdx]), (ref_label, labels[mdx]), stderr,
                                diverged, trials, f_bar=f_bar)


def estimate_lambda(scenario, h_star_idx, control=None, N=10, K=None, trials=200, rng=None, f_noise=True):
    M = scenario.M
    if not 0 <= h_star_idx < len(M):
        raise ConfigError("h* index {} is not in M".format(h_star_idx))
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    K = scenario.horizon if K is None else K
    rng = rng or np.random.default_rng(0)
    terms, diverged = rollout_terms(scenario, M[h_star_idx], h_star_idx, control, K, trials, rng, f_noise)
    return report_from_terms(terms, N, M.labels, M.labels[h_star_idx], diverged)


def estimate_lambda_bar(scenario, h_star=None, control=None, N=10, K=None, trials=200, rng=None, f_noise=True):
    """h_star defaults to the scenario's true model."""
    h_star = scenario.h_star if h_star is None else h_star
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    K = scenario.horizon if K is None else K
    rng = rng or np.random.default_rng(0)
    terms, diverged = rollout_terms(scenario, h_star, None, control, K, trials, rng, f_noise)
    return report_from_terms(terms, N, scenario.M.labels, h_star.label, diverged, f_bar=True)


def lambda_bar_growth(scenario, N_list, h_star=None, control=None, K=None, trials=200, rng=None, f_noise=True):
    """lambda_bar^N for every N in N_list from one batch of rollouts."""
    h_star = scenario.h_star if h_star is None else h_star
    K = scenario.horizon if K is None else K
    rng = rng or np.random.default_rng(0)
    terms, diverged = rollout_terms(scenario, h_star, None, control, K, trials, rng, f_noise)
    return [report_from_terms(terms, N, scenario.M.labels, h_star.label, diverged, f_bar=True)
            for N in N_list]


def is_fundamentally_limited(report, tol=None):
    """lambda^N <= tol, with tol = 3 standard errors by default."""
    tol = 3.0 * report.stderr if tol is None else tol
    return bool(report.lambda_min <= tol)
