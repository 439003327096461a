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

from lib.myutil import ConfigError
from models.integrate import rk4, rk4_jac
from models.system import SystemModel


"""
[Note]

Two water tanks in series with Torricelli outflow. State (h1, h2), one
pump inflow into tank 1:

    A dh1/dt = k_pump (u + d) - (c12 + th1 c_leak + th12 c_leak) r(h1)
    A dh2/dt = (c12 + th12 c_leak) r(h1) - (c2 + th2 c_leak) r(h2)

th1 leaks tank 1 to the environment, th12 leaks tank 1 into tank 2 and th2
leaks tank 2. r is a square root smoothed at zero so the Jacobian stays
finite for empty tanks.
"""


SQRT_EPS = 1e-6
LEAK_LABELS = ["leak_1", "leak_12", "leak_2"]


def _root(h):
    return np.sqrt(np.maximum(h, 0.0) + SQRT_EPS) - np.sqrt(SQRT_EPS)


def _droot(h):
    return np.where(h > 0.0, 0.5 / np.sqrt(np.maximum(h, 0.0) + SQRT_EPS), 0.0)


class TankCoeffs(object):
    def __init__(self, area, c12, c2, c_leak, k_pump, theta, d=0.0):
        self.area = area
        self.c12 = c12
        self.c2 = c2
        self.c_leak = c_leak
        self.k_pump = k_pump
        self.theta = np.asarray(theta, dtype=float)
        self.d = d

    def outflow(self):
        th1, th12, th2 = self.theta * self.c_leak
        return self.c12 + th1 + th12, self.c12 + th12, self.c2 + th2

    def f_ct(self, x, u):
        out1, into2, out2 = self.outflow()
        r1, r2 = _root(x[0]), _root(x[1])
        return np.array([self.k_pump * (u[0] + self.d) - out1 * r1,
                         into2 * r1 - out2 * r2]) / self.area

    def df_ct(self, x, u):
        out1, into2, out2 = self.outflow()
        dr1, dr2 = _droot(x[0]), _droot(x[1])
        return np.array([[-out1 * dr1, 0.0],
                         [into2 * dr1, -out2 * dr2]]) / self.area


class TankLevelPolicy(object):
    """Proportional level controller on one measured tank."""
    def __init__(self, box, ref=1.0, kp=0.5, u_ss=0.5, channel=-1):
        self.box = box
        self.ref = ref
        self.kp = kp
        self.u_ss = u_ss
        self.channel = channel

    def __call__(self, k, y):
        u = self.u_ss + self.kp * (self.ref - y[self.channel])
        return self.box.clip([u])


class TwoTankFamily(object):
    DEFAULTS = {"area": 1.0, "c12": 0.5, "c2": 0.5, "c_leak": 0.05, "k_pump": 1.0,
                "leak": 1.0, "measured": [0, 1]}

    def __init__(self, cfg):
        self.cfg = cfg
        fp = dict(self.DEFAULTS)
        fp.update(cfg.fault_params)
        for key in ["area", "c12", "c2", "c_leak", "k_pump", "leak"]:
            if not np.isfinite(fp[key]) or fp[key] < 0:
                raise ConfigError("two_tank fault parameter {} must be nonnegative, got {}".format(key, fp[key]))
        if fp["area"] <= 0 or fp["leak"] <= 0:
            raise ConfigError("two_tank needs area > 0 and leak > 0")
        self.measured = [int(i) for i in fp["measured"]]
        if not self.measured or len(set(self.measured)) != len(self.measured) or \
           any(i not in (0, 1) for i in self.measured):
            raise ConfigError("two_tank measured must be a nonempty subset of [0, 1], got {}".format(fp["measured"]))
        self.fp = fp
        self.dt = 1.0 if cfg.dt is None else cfg.dt
        self.substeps = cfg.rk4_substeps or 4

    nx = 2
    nu = 1

    @property
    def ny(self):
        return len(self.measured)

    def hypotheses(self):
        hyps = [("nominal", {"theta": [0.0, 0.0, 0.0]})]
        for i, label in enumerate(LEAK_LABELS):
            theta = [0.0, 0.0, 0.0]
            theta[i] = self.fp["leak"]
            hyps.append((label, {"theta": theta}))
        return hyps

    def unmodeled(self, rng):
        j = 0 if rng is None else int(rng.integers(len(LEAK_LABELS)))
        theta = [0.0, 0.0, 0.0]
        theta[j] = self.cfg.unmodeled_factor * self.fp["leak"]
        return "unmodeled_" + LEAK_LABELS[j], {"theta": theta}

    def perturb(self, params, param_dev, disturbance, u_max, rng):
        coeff = rng.uniform(-1.0, 1.0, size=3)
        theta = rng.uniform(-1.0, 1.0, size=3)
        d = rng.uniform(-1.0, 1.0)
        out = dict(params)
        out["c12"], out["c2"], out["c_leak"] = [self.fp[key] * (1.0 + param_dev * c)
                                                for key, c in zip(["c12", "c2", "c_leak"], coeff)]
        out["theta"] = list(np.asarray(params["theta"]) * (1.0 + param_dev * theta))
        out["d"] = disturbance * u_max * d
        return out

    def coeffs(self, params):
        return TankCoeffs(self.fp["area"], params.get("c12", self.fp["c12"]), params.get("c2", self.fp["c2"]),
                          params.get("c_leak", self.fp["c_leak"]), self.fp["k_pump"],
                          params["theta"], params.get("d", 0.0))

    def model(self, label, params, Q, R):
        tc = self.coeffs(params)
        sel = np.eye(2)[self.measured]
        dt, substeps = self.dt, self.substeps

        def f_dyn(x, u):
            return rk4(tc.f_ct, x, u, dt, substeps)

        def f_jac_dyn(x, u):
            return rk4_jac(tc.f_ct, tc.df_ct, x, u, dt, substeps)[1]

        def f_meas(x):
            return sel @ x

        def f_jac_meas(x):
            return sel

        return SystemModel(label, f_dyn, f_meas, Q, R, 2, 1, self.ny,
                           f_jac_dyn=f_jac_dyn, f_jac_meas=f_jac_meas,
                           params={"theta": list(tc.theta), "d": tc.d})

    def defaults(self):
        return {"Q_diag": [1e-6, 1e-6], "R_diag": [1e-4] * self.ny,
                "x0_mean": [1.0, 1.0], "x0_cov_diag": [1e-2, 1e-2],
                "control_bounds": [[0.0, 1.0]],
                "controller": {"ref": 1.0, "kp": 0.5, "u_ss": 0.5}}

    def policy(self, controller, box):
        return TankLevelPolicy(box, ref=controller.get("ref", 1.0), kp=controller.get("kp", 0.5),
                               u_ss=controller.get("u_ss", 0.5), channel=controller.get("channel", -1))
