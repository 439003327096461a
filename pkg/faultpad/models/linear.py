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

from lib.myutil import ConfigError, as_mat
from models.control import ConstantPolicy
from models.system import SystemModel


"""
[Note]

Linear Gaussian hypotheses

    x_{k+1} = A x_k + B_m (u_k + d) + w_k
    y_k     = C x_k + v_k

with analytic Jacobians (phi = A, H = C). Example 1 is the special case
A = C = I, B_{h*} = I, B_m = diag(1, 0.5).
"""


def make_linear_model(label, A, B, C, Q, R, d=None, params=None):
    A = np.atleast_2d(np.asarray(A, dtype=float))
    nx = A.shape[0]
    A = as_mat(A, nx, nx, "A of {}".format(label))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if B.shape[0] != nx:
        raise ConfigError("B of {} has {} rows, expected {}".format(label, B.shape[0], nx))
    nu = B.shape[1]
    C = np.atleast_2d(np.asarray(C, dtype=float))
    if C.shape[1] != nx:
        raise ConfigError("C of {} has {} columns, expected {}".format(label, C.shape[1], nx))
    ny = C.shape[0]
    d = np.zeros(nu) if d is None else np.asarray(d, dtype=float).reshape(nu)

    def f_dyn(x, u):
        return A @ x + B @ (u + d)

    def f_meas(x):
        return C @ x

    def f_jac_dyn(x, u):
        return A

    def f_jac_meas(x):
        return C

    params = dict(params or {})
    params.setdefault("B", B.tolist())
    return SystemModel(label, f_dyn, f_meas, Q, R, nx, nu, ny,
                       f_jac_dyn=f_jac_dyn, f_jac_meas=f_jac_meas, params=params)


# -------------------------------------------------
# Families

class LinearFamily(object):
    """
    Hypothesis family for the `custom` scenario. fault_params keys:
        A, C            shared matrices
        B               list of input matrices, one per hypothesis
        labels          optional hypothesis labels
        unmodeled_B     optional input matrix of the unmodeled truth
    """
    DEFAULTS = {}

    def __init__(self, cfg):
        self.cfg = cfg
        fp = dict(self.DEFAULTS)
        fp.update(cfg.fault_params)
        for key in ["A", "C", "B"]:
            if key not in fp:
                raise ConfigError("custom scenario needs fault_params.{}".format(key))
        self.A = np.atleast_2d(np.asarray(fp["A"], dtype=float))
        self.C = np.atleast_2d(np.asarray(fp["C"], dtype=float))
        self.Bs = [np.atleast_2d(np.asarray(B, dtype=float)) for B in fp["B"]]
        self.labels = list(fp.get("labels") or ["m{}".format(i) for i in range(len(self.Bs))])
        if len(self.labels) != len(self.Bs):
            raise ConfigError("custom scenario has {} labels for {} input matrices".format(
                              len(self.labels), len(self.Bs)))
        if fp.get("unmodeled_B") is not None:
            self.unmodeled_B = np.atleast_2d(np.asarray(fp["unmodeled_B"], dtype=float))
        else:
            # halfway between the first two modeled input matrices
            f = cfg.unmodeled_factor
            self.unmodeled_B = (1.0 - f) * self.Bs[0] + f * self.Bs[1]

    @property
    def nx(self):
        return self.A.shape[0]

    @property
    def nu(self):
        return self.Bs[0].shape[1]

    @property
    def ny(self):
        return self.C.shape[0]

    def hypotheses(self):
        return [(label, {"B": B}) for label, B in zip(self.labels, self.Bs)]

    def unmodeled(self, rng):
        return "unmodeled", {"B": self.unmodeled_B}

    def perturb(self, params, param_dev, disturbance, u_max, rng):
        """Entrywise +-param_dev on B and an input offset up to disturbance * u_max."""
        B = np.asarray(params["B"], dtype=float)
        scale = 1.0 + param_dev * rng.uniform(-1.0, 1.0, size=B.shape)
        d = disturbance * u_max * rng.uniform(-1.0, 1.0, size=self.nu)
        out = dict(params)
        out["B"] = B * scale
        out["d"] = d
        return out

    def defaults(self):
        return {"Q_diag": [0.01] * self.nx, "R_diag": [0.01] * self.ny,
                "x0_mean": [0.0] * self.nx, "x0_cov_diag": [0.1] * self.nx,
                "control_bounds": [[-1.0, 1.0]] * self.nu,
                "controller": {"u": [1.0] + [0.0] * (self.nu - 1)}}

    def policy(self, controller, box):
        return ConstantPolicy(box.clip(controller.get("u", [1.0] + [0.0] * (self.nu - 1))))

    def model(self, label, params, Q, R):
        return make_linear_model(label, self.A, params["B"], self.C, Q, R, d=params.get("d"),
                                 params={"B": np.asarray(params["B"]).tolist()})


class Example1Family(LinearFamily):
    DEFAULTS = {"A": [[1.0, 0.0], [0.0, 1.0]],
                "C": [[1.0, 0.0], [0.0, 1.0]],
                "B": [[[1.0, 0.0], [0.0, 1.0]], [[1.0, 0.0], [0.0, 0.5]]],
                "labels": ["h_star", "m"]}
