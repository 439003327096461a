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

from lib.myutil import ConfigError, as_vec, check_spd, symmetrize
from models.config import ScenarioConfig
from models.control import ControlBox
from models.linear import Example1Family, LinearFamily
from models.satellite import MarsSatelliteFamily
from models.system import HypothesisSet
from models.tank import TwoTankFamily


"""
[Note]

A Scenario bundles what one trial needs: the hypothesis set M, the true
system h* (possibly outside M), the prior (x0_hat, Sigma0), the nominal
policy, the admissible set U_a and the horizon K.
"""


SCENARIOS = {
    "two_tank": TwoTankFamily,
    "mars_satellite": MarsSatelliteFamily,
    "example1": Example1Family,
    "custom": LinearFamily,
}


class Scenario(object):
    def __init__(self, name, M, h_star, x0_mean, Sigma0, policy, U_a, horizon,
                 truth_index=None, config=None, nominal_box=None):
        self.name = name
        self.M = M
        self.h_star = h_star
        self.truth_index = truth_index
        self.x0_mean = as_vec(x0_mean, M.nx, "x0_mean")
        self.Sigma0 = check_spd(symmetrize(np.asarray(Sigma0, dtype=float)), "Sigma0")
        if self.Sigma0.shape != (M.nx, M.nx):
            raise ConfigError("Sigma0 has shape {}, expected {}".format(self.Sigma0.shape, (M.nx, M.nx)))
        self.policy = policy
        self.U_a = U_a
        if U_a.nu != M.nu:
            raise ConfigError("U_a has {} axes but the models take {} inputs".format(U_a.nu, M.nu))
        self.nominal_box = nominal_box or U_a
        self.horizon = int(horizon)
        self.config = config

    @property
    def truth_in_M(self):
        return self.truth_index is not None

    @property
    def truth_label(self):
        return self.h_star.label

    def __repr__(self):
        return "Scenario({}, M={}, h*={}, K={})".format(self.name, self.M.labels, self.h_star.label, self.horizon)


def _resolve(config, defaults, key):
    val = getattr(config, key)
    return defaults[key] if val is None else val


def _u_max(box):
    return float(np.max(np.maximum(np.abs(box.lower), np.abs(box.upper))))


def build_scenario(name=None, config=None, rng=None, truth=None, mismatch_rng=None, authority_scale=1.0):
    """
    truth:          None draws h* (in M w.p. pi_star) from rng, or takes the
                    first hypothesis when rng is None; an index or label picks
                    a hypothesis; "unmodeled" generates a fault outside M.
    mismatch_rng:   when given, the true system's parameters are perturbed by
                    the mismatch knobs. Draws from it never touch rng.
    """
    config = config or ScenarioConfig()
    name = name or config.scenario
    if name not in SCENARIOS:
        raise ConfigError("Unknown scenario {}, expected one of {}".format(name, sorted(SCENARIOS)))
    family = SCENARIOS[name](config)
    defaults = family.defaults()

    s = config.noise_scale
    Q_diag = np.asarray(_resolve(config, defaults, "Q_diag"), dtype=float)
    R_diag = np.asarray(_resolve(config, defaults, "R_diag"), dtype=float)
    if Q_diag.shape != (family.nx,) or R_diag.shape != (family.ny,):
        raise ConfigError("{}: Q_diag needs {} and R_diag {} entries".format(name, family.nx, family.ny))
    Q = np.diag(Q_diag * (s if config.scale_process_noise else 1.0))
    R = np.diag(R_diag * s)

    nominal_box = ControlBox.from_bounds(_resolve(config, defaults, "control_bounds"))
    if nominal_box.nu != family.nu:
        raise ConfigError("{}: control_bounds needs {} axes".format(name, family.nu))
    U_a = nominal_box.scaled(authority_scale)

    hyps = family.hypotheses()
    M = HypothesisSet([family.model(label, params, Q, R) for label, params in hyps])

    # Truth
    truth_index = None
    if truth is None and rng is None:
        truth_index = 0
    elif truth is None:
        if rng.random() < config.pi_star:
            truth_index = int(rng.integers(len(M)))
    elif truth == "unmodeled":
        pass
    elif isinstance(truth, str) and (truth in M or not truth.isdigit()):
        if truth not in M:
            raise ConfigError("Unknown truth {}, expected one of {} or unmodeled".format(truth, M.labels))
        truth_index = M.index(truth)
    else:
        truth_index = int(truth)
        if not 0 <= truth_index < len(M):
            raise ConfigError("Truth index {} out of range".format(truth))

    if truth_index is None:
        label, params = family.unmodeled(rng)
    else:
        label, params = hyps[truth_index]

    if mismatch_rng is not None:
        params = family.perturb(params, config.mismatch["param_dev"], config.mismatch["disturbance"],
                                _u_max(nominal_box), mismatch_rng)
        h_star = family.model(label, params, Q, R)
    elif truth_index is None:
        h_star = family.model(label, params, Q, R)
    else:
        h_star = M[truth_index]

    controller = dict(defaults["controller"])
    controller.update(config.controller)
    policy = family.policy(controller, nominal_box)

    x0_mean = _resolve(config, defaults, "x0_mean")
    Sigma0 = np.diag(np.asarray(_resolve(config, defaults, "x0_cov_diag"), dtype=float))
    return Scenario(name, M, h_star, x0_mean, Sigma0, policy, U_a, config.horizon,
                    truth_index=truth_index, config=config, nominal_box=nominal_box)
