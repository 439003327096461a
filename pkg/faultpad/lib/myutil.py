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


"""
[Note]

Errors and small utility functions shared by every package.
"""


# -------------------------------------------------
# Errors

class FidError(Exception):
    def __init__(self, msg=""):
        super().__init__(msg)
        self.msg = msg


class ConfigError(FidError):
    pass


class DimensionError(FidError):
    pass


class ModelEvalError(FidError):
    pass


class LinearizationError(FidError):
    pass


class DivergenceError(FidError):
    pass


class InputError(FidError):
    pass


class SimulationBlowup(FidError):
    pass


class SweepAbort(FidError):
    pass


# -------------------------------------------------
# Helpers

def as_vec(x, n, what="vector"):
    """Coerce x to a float vector of length n or raise DimensionError."""
    v = np.asarray(x, dtype=float).reshape(-1)
    if v.shape[0] != n:
        raise DimensionError("{} has length {}, expected {}".format(what, v.shape[0], n))
    return v


def as_mat(a, rows, cols, what="matrix"):
    m = np.atleast_2d(np.asarray(a, dtype=float))
    if m.shape != (rows, cols):
        raise DimensionError("{} has shape {}, expected {}".format(what, m.shape, (rows, cols)))
    return m


def is_spd(a, tol=0.0):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    if not np.all(np.isfinite(a)) or not np.allclose(a, a.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(a).max())):
        return False
    return bool(np.linalg.eigvalsh(a).min() > tol)


def check_spd(a, what):
    if not is_spd(a):
        raise ConfigError("{} must be symmetric positive definite".format(what))
    return np.asarray(a, dtype=float)


def symmetrize(a):
    return 0.5 * (a + a.T)

