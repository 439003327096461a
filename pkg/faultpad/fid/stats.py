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

import numpy as np
from scipy.special import gammaincinv

from lib.myutil import ConfigError


"""
[Note]

Two-tailed chi-square consistency test on the window mean statistic

    chi_bar = (1/N) sum_i e_i^T S_i^-1 e_i,

which is chi2(n_y N) / N for a consistent filter. The hypothesis is rejected
when chi_bar leaves [chi2inv(alpha/2, n_y N) / N, chi2inv(1 - alpha/2, n_y N) / N].
"""


ACCEPT = "accept"
REJECT = "reject"

# (p, dof, quantile)
CHI2_TABLE = [
    (0.975, 25, 40.646),
    (0.025, 25, 13.120),
    (0.95, 1, 3.8415),
    (0.05, 10, 3.940),
    (0.99, 50, 76.154),
]


def chi2inv(p, dof):
    """Inverse chi-square CDF through the regularized incomplete gamma inverse."""
    if not 0.0 < p < 1.0 or dof <= 0:
        raise ConfigError("chi2inv needs p in (0, 1) and dof > 0, got p={} dof={}".format(p, dof))
    return 2.0 * float(gammaincinv(0.5 * dof, p))


def check_chi2_table(rtol=1e-4):
    for p, dof, q in CHI2_TABLE:
        got = chi2inv(p, dof)
        if abs(got - q) > rtol * q:
            raise ConfigError("chi2inv({}, {}) = {} disagrees with table value {}".format(p, dof, got, q))


@functools.lru_cache(maxsize=None)
def chi2_bounds(N, n_y, alpha):
    """Acceptance interval for chi_bar."""
    if not 0.0 < alpha < 1.0:
        raise ConfigError("alpha must lie in (0, 1), got {}".format(alpha))
    dof = n_y * N
    return chi2inv(0.5 * alpha, dof) / N, chi2inv(1.0 - 0.5 * alpha, dof) / N


def hypothesis_test(chi_bar, N, n_y, alpha):
    lo, hi = chi2_bounds(int(N), int(n_y), float(alpha))
    if not np.isfinite(chi_bar) or chi_bar > hi or chi_bar < lo:
        return REJECT
    return ACCEPT


class HypothesisTest(object):
    """Bound test for one (N, n_y, alpha); checks the quantiles once."""
    _checked = False

    def __init__(self, N, n_y, alpha):
        if not HypothesisTest._checked:
            check_chi2_table()
            HypothesisTest._checked = True
        self.N = int(N)
        self.n_y = int(n_y)
        self.alpha = float(alpha)
        self.lo, self.hi = chi2_bounds(self.N, self.n_y, self.alpha)

    def __call__(self, chi_bar):
        return hypothesis_test(chi_bar, self.N, self.n_y, self.alpha)
