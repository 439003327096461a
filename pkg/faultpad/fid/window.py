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

from lib.myutil import ConfigError


"""
[Note]

Information window I_k^N: for every hypothesis a ring of the last N
(k, u_{k-1}, y_k, e_k, S_k) records with the per-step Gaussian log-density
log N(e_k; 0, S_k). The rings of all hypotheses are aligned on k; a diverged
filter contributes a record with log-density -inf.
"""


LOG_2PI = np.log(2.0 * np.pi)


def gauss_terms(e, S):
    """(e^T S^-1 e, log N(e; 0, S)); (inf, -inf) when S is not SPD."""
    e = np.asarray(e, dtype=float).reshape(-1)
    S = np.atleast_2d(np.asarray(S, dtype=float))
    if not (np.all(np.isfinite(e)) and np.all(np.isfinite(S))):
        return np.inf, -np.inf
    try:
        c, low = cho_factor(S, lower=True)
    except (LinAlgError, ValueError):
        return np.inf, -np.inf
    stat = float(e @ cho_solve((c, low), e))
    logdet = 2.0 * float(np.sum(np.log(np.diag(c))))
    return stat, -0.5 * (stat + e.shape[0] * LOG_2PI + logdet)


class WindowRecord(object):
    def __init__(self, k, u, y, e, S, stat, logpdf):
        self.k = k
        self.u = u
        self.y = y
        self.e = e
        self.S = S
        self.stat = stat
        self.logpdf = logpdf

    @staticmethod
    def from_innovation(k, u, y, e, S):
        stat, logpdf = gauss_terms(e, S)
        return WindowRecord(k, u, y, e, S, stat, logpdf)

    @staticmethod
    def rejected(k, u, y):
        return WindowRecord(k, u, y, None, None, np.inf, -np.inf)


def log_likelihood(entries):
    """log of the joint window likelihood: sum of per-step log-densities."""
    total = 0.0
    for rec in entries:
        if not rec.logpdf > -np.inf:
            return -np.inf
        total += rec.logpdf
    return total


class Window(object):
    def __init__(self, N, n_hyp):
        if int(N) != N or N < 1:
            raise ConfigError("Window length must be an integer >= 1, got {}".format(N))
        self.N = int(N)
        self.rings = [deque(maxlen=self.N) for _ in range(n_hyp)]

    def __len__(self):
        return len(self.rings[0])

    @property
    def full(self):
        return len(self) == self.N

    def push(self, k, u, y, states):
        for ring, fs in zip(self.rings, states):
            if fs.diverged or fs.e is None:
                ring.append(WindowRecord.rejected(k, u, y))
            else:
                ring.append(WindowRecord.from_innovation(k, u, y, fs.e, fs.S))

    def entries(self, i):
        return list(self.rings[i])

    def log_likelihoods(self):
        return np.array([log_likelihood(ring) for ring in self.rings])

    def chi_bar(self, i):
        """(1/N) sum of e^T S^-1 e over the window."""
        return float(np.mean([rec.stat for rec in self.rings[i]]))
