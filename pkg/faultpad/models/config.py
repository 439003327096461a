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

import copy
import json

from lib.myutil import ConfigError


"""
[Note]

Scenario configuration (JSON, schema version 1). Unknown keys are errors.
Missing physical quantities (noise, prior, bounds, controller gains, time
step) fall back to the scenario family's defaults when the scenario is built.
"""


SCHEMA_VERSION = 1
SCENARIO_NAMES = ["two_tank", "mars_satellite", "example1", "custom"]
MODES = ["passive", "active"]

DEFAULTS = {
    "version": SCHEMA_VERSION,
    "scenario": "two_tank",
    "horizon": 200,
    "noise_scale": 1.0,
    "scale_process_noise": False,
    "pi_star": 0.8,
    "fault_params": {},
    "control_bounds": None,
    "dt": None,
    "rk4_substeps": None,
    "Q_diag": None,
    "R_diag": None,
    "x0_mean": None,
    "x0_cov_diag": None,
    "controller": {},
    "unmodeled_factor": 0.5,
    "mismatch": {"param_dev": 0.0, "disturbance": 0.0},
    "fid": {"N": 10, "alpha": 0.05, "b_th": 0.95, "renorm": True, "reject": True,
            "b0": None, "joseph": False},
    "design": {"grid_per_axis": 9, "refine_iters": 1, "exponent": None, "frozen_cov": False},
    "divergence": {"trace_cap": 1e6, "chi2_cap": 1e3},
    "experiment": {"name": None, "modes": ["passive", "active"], "N_list": [5, 10, 25, 50],
                   "noise_list": [1.0], "trials": 500, "seed": 0,
                   "ablations": [{"renorm": True, "reject": True}],
                   "authority_scale": [1.0], "workers": None, "plots": False,
                   "diag_trials": 200},
}

# sections whose keys are fixed by the schema
SECTIONS = ["mismatch", "fid", "design", "divergence", "experiment"]


def _merge(base, update, where):
    out = copy.deepcopy(base)
    for key, val in update.items():
        if key not in base:
            raise ConfigError("Unknown config key {}{}".format(where, key))
        if key in SECTIONS and where == "":
            if not isinstance(val, dict):
                raise ConfigError("Config section {} must be an object".format(key))
            out[key] = _merge(base[key], val, key + ".")
        else:
            out[key] = copy.deepcopy(val)
    return out


class ScenarioConfig(object):
    def __init__(self, **kwargs):
        self._data = _merge(DEFAULTS, kwargs, "")
        for key, val in self._data.items():
            setattr(self, key, val)
        self.validate()

    @staticmethod
    def from_json(path):
        try:
            with open(path, 'r') as f:
                data = json.load(f)
        except (OSError, ValueError) as e:
            raise ConfigError("Cannot read config {}: {}".format(path, e))
        if not isinstance(data, dict):
            raise ConfigError("Config {} must hold a JSON object".format(path))
        return ScenarioConfig(**data)

    def to_dict(self):
        return copy.deepcopy(self._data)

    def override(self, **kwargs):
        """
        Updated copy. Keys are top-level names or dotted section keys
        ("fid.N"); None values are skipped so unset CLI flags change nothing.
        """
        data = self.to_dict()
        for key, val in kwargs.items():
            if val is None:
                continue
            if "." in key:
                section, sub = key.split(".", 1)
                if section not in SECTIONS or sub not in DEFAULTS[section]:
                    raise ConfigError("Unknown config key {}".format(key))
                data[section][sub] = val
            else:
                if key not in DEFAULTS:
                    raise ConfigError("Unknown config key {}".format(key))
                data[key] = val
        return ScenarioConfig(**data)

    def validate(self):
        if self.version != SCHEMA_VERSION:
            raise ConfigError("Unsupported config version {}".format(self.version))
        if self.scenario not in SCENARIO_NAMES:
            raise ConfigError("Unknown scenario {}, expected one of {}".format(self.scenario, SCENARIO_NAMES))
        if int(self.horizon) != self.horizon or self.horizon < 0:
            raise ConfigError("horizon must be a nonnegative integer")
        if not self.noise_scale > 0:
            raise ConfigError("noise_scale must be positive")
        if not 0.0 <= self.pi_star <= 1.0:
            raise ConfigError("pi_star must lie in [0, 1], got {}".format(self.pi_star))
        if self.dt is not None and not self.dt > 0:
            raise ConfigError("dt must be positive")
        if self.rk4_substeps is not None and (int(self.rk4_substeps) != self.rk4_substeps or self.rk4_substeps < 1):
            raise ConfigError("rk4_substeps must be a positive integer")
        if not self.unmodeled_factor > 0:
            raise ConfigError("unmodeled_factor must be positive")
        if self.mismatch["param_dev"] < 0 or self.mismatch["disturbance"] < 0:
            raise ConfigError("mismatch knobs must be nonnegative")

        fid = self.fid
        if int(fid["N"]) != fid["N"] or fid["N"] < 1:
            raise ConfigError("fid.N must be an integer >= 1, got {}".format(fid["N"]))
        if not 0.0 < fid["alpha"] < 1.0:
            raise ConfigError("fid.alpha must lie in (0, 1), got {}".format(fid["alpha"]))
        if not 0.0 < fid["b_th"] <= 1.0:
            raise ConfigError("fid.b_th must lie in (0, 1], got {}".format(fid["b_th"]))

        design = self.design
        if design["grid_per_axis"] < 1 or design["refine_iters"] < 0:
            raise ConfigError("design needs grid_per_axis >= 1 and refine_iters >= 0")
        if design["exponent"] is not None and not design["exponent"] > 0:
            raise ConfigError("design.exponent must be positive")
        if not (self.divergence["trace_cap"] > 0 and self.divergence["chi2_cap"] > 0):
            raise ConfigError("divergence caps must be positive")

        exp = self.experiment
        if exp["trials"] < 1 or exp["diag_trials"] < 1:
            raise ConfigError("experiment trials must be >= 1")
        if not exp["modes"] or any(m not in MODES for m in exp["modes"]):
            raise ConfigError("experiment.modes must be a nonempty subset of {}".format(MODES))
        if not exp["N_list"] or any(int(n) != n or n < 1 for n in exp["N_list"]):
            raise ConfigError("experiment.N_list must be a nonempty list of integers >= 1")
        if not exp["noise_list"] or any(not s > 0 for s in exp["noise_list"]):
            raise ConfigError("experiment.noise_list must be a nonempty list of positive scales")
        if not exp["ablations"]:
            raise ConfigError("experiment.ablations must be nonempty")
        for abl in exp["ablations"]:
            if any(key not in ("renorm", "reject", "alpha") for key in abl):
                raise ConfigError("Unknown ablation key in {}".format(abl))
        scales = exp["authority_scale"]
        scales = scales if isinstance(scales, list) else [scales]
        if not scales or any(s < 0 for s in scales):
            raise ConfigError("experiment.authority_scale must be nonnegative")

    def __repr__(self):
        return "ScenarioConfig({})".format(json.dumps(self._data, sort_keys=True))
