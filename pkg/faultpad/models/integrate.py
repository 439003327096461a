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

Fixed-step RK4 for the continuous-time scenario models. rk4_jac also carries
the Jacobian of the discrete map through the stages (variational equations),
which gives scenarios an analytic dF/dx without finite differences.
"""


def rk4(f_ct, x, u, dt, substeps=1, post=None):
    """Integrate xdot = f_ct(x, u) over dt with zero-order-hold u."""
    h = dt / substeps
    x = np.array(x, dtype=float)
    for _ in range(substeps):
        k1 = f_ct(x, u)
        k2 = f_ct(x + 0.5 * h * k1, u)
        k3 = f_ct(x + 0.5 * h * k2, u)
        k4 = f_ct(x + h * k3, u)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if post is not None:
            x = post(x)
    return x


def rk4_jac(f_ct, df_ct, x, u, dt, substeps=1):
    """Returns (x', Phi) where Phi = d x' / d x of the RK4 map."""
    h = dt / substeps
    x = np.array(x, dtype=float)
    n = x.shape[0]
    eye = np.eye(n)
    phi = eye.copy()
    for _ in range(substeps):
        k1 = f_ct(x, u)
        j1 = df_ct(x, u)
        x2 = x + 0.5 * h * k1
        k2 = f_ct(x2, u)
        j2 = df_ct(x2, u) @ (eye + 0.5 * h * j1)
        x3 = x + 0.5 * h * k2
        k3 = f_ct(x3, u)
        j3 = df_ct(x3, u) @ (eye + 0.5 * h * j2)
        x4 = x + h * k3
        k4 = f_ct(x4, u)
        j4 = df_ct(x4, u) @ (eye + h * j3)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        phi = (eye + (h / 6.0) * (j1 + 2.0 * j2 + 2.0 * j3 + j4)) @ phi
    return x, phi
