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

from lib.myutil import ConfigError, as_vec
from models.integrate import rk4
from models.system import SystemModel


"""
[Note]

Rigid spacecraft with MRP attitude sigma and body rate omega (x = (sigma, omega)):

    dsigma/dt = 1/4 B(sigma) omega
    J domega/dt = -omega x J omega + diag(eta) u + d

B(sigma) = (1 - sigma^T sigma) I + 2 [sigma x] + 2 sigma sigma^T. Faults scale the
torque on one principal axis (eta_i < 1). The attitude is switched to the
shadow set after every RK4 substep, so the discrete dynamics are
discontinuous on the unit sphere.
"""


def mrp_shadow(sigma):
    """-sigma / |sigma|^2 outside the unit ball; the boundary stays put."""
    sigma = as_vec(sigma, 3, "MRP")
    s2 = float(sigma @ sigma)
    if s2 > 1.0:
        return -sigma / s2
    return sigma


def skew(v):
    return np.array([[0.0, -v[2], v[1]],
                     [v[2], 0.0, -v[0]],
                     [-v[1], v[0], 0.0]])


def mrp_bmat(sigma):
    s2 = float(sigma @ sigma)
    return (1.0 - s2) * np.eye(3) + 2.0 * skew(sigma) + 2.0 * np.outer(sigma, sigma)


def _shadow_state(x):
    x = x.copy()
    x[:3] = mrp_shadow(x[:3])
    return x


class Rigidbody(object):
    def __init__(self, inertia, eta, d=None):
        self.inertia = np.asarray(inertia, dtype=float)
        self.eta = np.asarray(eta, dtype=float)
        self.d = np.zeros(3) if d is None else np.asarray(d, dtype=float)

    def f_ct(self, x, u):
        sigma, omega = x[:3], x[3:]
        dsigma = 0.25 * mrp_bmat(sigma) @ omega
        torque = -np.cross(omega, self.inertia * omega) + self.eta * u + self.d
        return np.concatenate([dsigma, torque / self.inertia])


class AttitudePDPolicy(object):
    """MRP/rate PD attitude tracking law, saturated to the box."""
    def __init__(self, box, kp=4.0, kd=6.0, sigma_ref=(0.0, 0.0, 0.0)):
        self.box = box
        self.kp = kp
        self.kd = kd
        self.sigma_ref = np.asarray(sigma_ref, dtype=float)

    def __call__(self, k, y):
        u = -self.kp * (y[:3] - self.sigma_ref) - self.kd * y[3:6]
        return self.box.clip(u)


class MarsSatelliteFamily(object):
    DEFAULTS = {"inertia": [10.0, 12.0, 8.0], "torque_factor": 0.5}

    nx = 6
    nu = 3
    ny = 6

    def __init__(self, cfg):
        self.cfg = cfg
        fp = dict(self.DEFAULTS)
        fp.update(cfg.fault_params)
        self.inertia = np.asarray(fp["inertia"], dtype=float)
        if self.inertia.shape != (3,) or np.any(self.inertia <= 0):
            raise ConfigError("mars_satellite inertia must be 3 positive principal moments")
        self.torque_factor = float(fp["torque_factor"])
        if not 0.0 <= self.torque_factor < 1.0:
            raise ConfigError("mars_satellite torque_factor must lie in [0, 1), got {}".format(self.torque_factor))
        self.dt = 0.5 if cfg.dt is None else cfg.dt
        self.substeps = cfg.rk4_substeps or 5

    def hypotheses(self):
        hyps = [("0", {"eta": [1.0, 1.0, 1.0]})]
        for i in range(3):
            eta = [1.0, 1.0, 1.0]
            eta[i] = self.torque_factor
            hyps.append((str(i + 1), {"eta": eta}))
        return hyps

    def unmodeled(self, rng):
        j = 0 if rng is None else int(rng.integers(3))
        eta = [1.0, 1.0, 1.0]
        eta[j] = 1.0 - self.cfg.unmodeled_factor * (1.0 - self.torque_factor)
        return "unmodeled_{}".format(j + 1), {"eta": eta}

    def perturb(self, params, param_dev, disturbance, u_max, rng):
        dev = rng.uniform(-1.0, 1.0, size=3)
        d = rng.uniform(-1.0, 1.0, size=3)
        out = dict(params)
        out["eta"] = list(np.asarray(params["eta"]) * (1.0 + param_dev * dev))
        out["d"] = list(disturbance * u_max * d)
        return out

    def model(self, label, params, Q, R):
        body = Rigidbody(self.inertia, params["eta"], params.get("d"))
        dt, substeps = self.dt, self.substeps

        def f_dyn(x, u):
            return rk4(body.f_ct, x, u, dt, substeps, post=_shadow_state)

        def f_meas(x):
            return x

        def f_jac_meas(x):
            return np.eye(6)

        # dynamics Jacobian by finite differences
        return SystemModel(label, f_dyn, f_meas, Q, R, 6, 3, 6, f_jac_meas=f_jac_meas,
                           params={"eta": list(body.eta), "d": list(body.d)})

    def defaults(self):
        return {"Q_diag": [1e-8] * 3 + [1e-6] * 3, "R_diag": [1e-4] * 6,
                "x0_mean": [0.2, -0.1, 0.15, 0.0, 0.0, 0.0],
                "x0_cov_diag": [1e-3] * 3 + [1e-4] * 3,
                "control_bounds": [[-1.0, 1.0]] * 3,
                "controller": {"kp": 4.0, "kd": 6.0, "sigma_ref": [0.0, 0.0, 0.0]}}

    def policy(self, controller, box):
        return AttitudePDPolicy(box, kp=controller.get("kp", 4.0), kd=controller.get("kd", 6.0),
                                sigma_ref=controller.get("sigma_ref", [0.0, 0.0, 0.0]))
