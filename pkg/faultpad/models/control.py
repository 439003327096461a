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

from lib.myutil import ConfigError, DimensionError, as_vec


"""
[Note]

Admissible control sets and control sources.

A control source is anything callable as policy(k, y_k) -> u_k. Controllers
only ever see measurements, never the true state.
"""


# -------------------------------------------------
# Admissible control set

class ControlBox(object):
    """Axis-aligned box U_a = [lower_1, upper_1] x ... x [lower_nu, upper_nu]."""
    def __init__(self, lower, upper):
        self.lower = np.asarray(lower, dtype=float).reshape(-1)
        self.upper = np.asarray(upper, dtype=float).reshape(-1)
        if self.lower.shape != self.upper.shape or self.lower.shape[0] == 0:
            raise ConfigError("Control box bounds must be nonempty and of equal length")
        if not (np.all(np.isfinite(self.lower)) and np.all(np.isfinite(self.upper))):
            raise ConfigError("Control box bounds must be finite")
        if np.any(self.lower > self.upper):
            raise ConfigError("Control box needs lower <= upper on every axis: {} {}".format(
                              self.lower, self.upper))

    @staticmethod
    def from_bounds(bounds):
        bounds = np.asarray(bounds, dtype=float)
        if bounds.ndim != 2 or bounds.shape[1] != 2:
            raise ConfigError("control_bounds must be a list of [lo, hi] pairs, got {}".format(bounds.tolist()))
        return ControlBox(bounds[:, 0], bounds[:, 1])

    @property
    def nu(self):
        return self.lower.shape[0]

    def scaled(self, scale):
        """{scale * u | u in U_a}"""
        if scale < 0:
            raise ConfigError("Authority scale must be nonnegative, got {}".format(scale))
        return ControlBox(scale * self.lower, scale * self.upper)

    def contains(self, u, tol=1e-12):
        u = as_vec(u, self.nu, "control")
        return bool(np.all(u >= self.lower - tol) and np.all(u <= self.upper + tol))

    def clip(self, u):
        return np.clip(as_vec(u, self.nu, "control"), self.lower, self.upper)

    def grid(self, per_axis):
        """Candidates in lexicographic order (first axis slowest)."""
        if per_axis < 1:
            raise ConfigError("grid_per_axis must be >= 1")
        axes = []
        for lo, hi in zip(self.lower, self.upper):
            if lo == hi or per_axis == 1:
                axes.append(np.array([0.5 * (lo + hi)]))
            else:
                axes.append(np.linspace(lo, hi, per_axis))
        return np.array(list(itertools.product(*axes)), dtype=float)

    def spacing(self, per_axis):
        if per_axis <= 1:
            return self.upper - self.lower
        return (self.upper - self.lower) / (per_axis - 1)

    def to_list(self):
        return [[float(lo), float(hi)] for lo, hi in zip(self.lower, self.upper)]


# -------------------------------------------------
# Control sources

class ConstantPolicy(object):
    def __init__(self, u):
        self.u = np.asarray(u, dtype=float).reshape(-1)

    def __call__(self, k, y):
        return self.u.copy()


class SequencePolicy(object):
    """Open-loop sequence; holds the last entry once the sequence runs out."""
    def __init__(self, seq):
        self.seq = np.atleast_2d(np.asarray(seq, dtype=float))
        if self.seq.shape[0] == 0:
            raise ConfigError("Empty control sequence")

    def __call__(self, k, y):
        return self.seq[min(k, self.seq.shape[0] - 1)].copy()


def as_control_source(src, nu):
    if src is None:
        raise ConfigError("No control source given")
    if callable(src):
        return src
    arr = np.asarray(src, dtype=float)
    if arr.ndim == 1:
        if arr.shape[0] != nu:
            raise DimensionError("Constant control has length {}, expected {}".format(arr.shape[0], nu))
        return ConstantPolicy(arr)
    if arr.ndim == 2 and arr.shape[1] == nu:
        return SequencePolicy(arr)
    raise DimensionError("Cannot use control source of shape {}".format(arr.shape))
