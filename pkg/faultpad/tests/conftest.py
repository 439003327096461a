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

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from models.config import ScenarioConfig  # noqa: E402
from models.linear import make_linear_model  # noqa: E402
from models.scenario import build_scenario  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: Monte Carlo runs at experiment scale")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def scalar_model():
    """x' = x + u, y = x, Q = R = 1."""
    return make_linear_model("scalar", [[1.0]], [[1.0]], [[1.0]], [[1.0]], [[1.0]])


def gain_config(g1=1.0, g2=5.0, a=0.9, noise=0.01, N=5, horizon=200, u=1.0, pi_star=1.0, **kwargs):
    """Scalar linear pair x' = a x + g u, y = x."""
    return ScenarioConfig(scenario="custom", horizon=horizon, pi_star=pi_star,
                          fault_params={"A": [[a]], "C": [[1.0]], "B": [[[g1]], [[g2]]],
                                        "labels": ["gain_{:g}".format(g1), "gain_{:g}".format(g2)]},
                          control_bounds=[[-1.0, 1.0]], Q_diag=[noise], R_diag=[noise],
                          x0_mean=[0.0], x0_cov_diag=[0.1], controller={"u": [u]},
                          fid={"N": N}, **kwargs)


def example1_config(u=(1.0, 0.0), **kwargs):
    return ScenarioConfig(scenario="example1", horizon=100, pi_star=1.0, controller={"u": list(u)}, **kwargs)


@pytest.fixture
def example1():
    return build_scenario("example1", example1_config())


@pytest.fixture
def gain_cfg():
    return gain_config


@pytest.fixture
def example1_cfg():
    return example1_config
