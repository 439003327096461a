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
import pytest

from lib.myutil import ConfigError, DimensionError
from models.config import ScenarioConfig
from models.control import ControlBox, SequencePolicy, as_control_source
from models.integrate import rk4
from models.satellite import mrp_shadow
from models.scenario import build_scenario
from models.system import (HypothesisSet, SystemModel, fd_jacobian, linearize, measure, probe_points,
                           step_dynamics)


# -------------------------------------------------
# Dynamics and measurement

def test_example1_step_dynamics(example1, rng):
    h_star, m = example1.M[0], example1.M[1]
    np.testing.assert_allclose(step_dynamics(h_star, [1.0, 1.0], [1.0, 0.0], rng, f_noise=False), [2.0, 1.0])
    np.testing.assert_allclose(step_dynamics(m, [1.0, 1.0], [0.0, 2.0], rng, f_noise=False), [1.0, 2.0])


def test_fixed_point_without_noise(example1, rng):
    x = np.array([0.3, -0.7])
    np.testing.assert_array_equal(step_dynamics(example1.M[1], x, [0.0, 0.0], rng, f_noise=False), x)


def test_noiseless_runs_are_reproducible(example1):
    a = step_dynamics(example1.M[1], [0.1, 0.2], [0.5, -0.5], np.random.default_rng(1), f_noise=False)
    b = step_dynamics(example1.M[1], [0.1, 0.2], [0.5, -0.5], np.random.default_rng(2), f_noise=False)
    np.testing.assert_array_equal(a, b)


def test_dimension_mismatch_raises(example1, rng):
    with pytest.raises(DimensionError):
        step_dynamics(example1.M[0], [1.0, 1.0, 1.0], [0.0, 0.0], rng)


def test_identity_measurement(example1, rng):
    np.testing.assert_allclose(measure(example1.M[0], [3.0, 4.0], rng, f_noise=False), [3.0, 4.0])


def test_tank_measures_selected_level(rng):
    cfg = ScenarioConfig(scenario="two_tank", fault_params={"measured": [1]})
    scenario = build_scenario("two_tank", cfg)
    assert scenario.M.ny == 1
    np.testing.assert_allclose(measure(scenario.M[0], [0.7, 1.3], rng, f_noise=False), [1.3])


def test_measurement_noise_mean():
    sigma = 0.1
    model = SystemModel("sum_prod", lambda x, u: x, lambda x: np.array([x[0] + x[1], x[0] * x[1]]),
                        np.eye(2), sigma ** 2 * np.eye(2), 2, 1, 2)
    rng = np.random.default_rng(7)
    x = np.array([1.0, -2.0])
    n = 100000
    ys = np.array([measure(model, x, rng) for _ in range(n)])
    assert ys.shape == (n, 2)
    assert np.all(np.abs(ys.mean(axis=0) - [-1.0, -2.0]) < 4 * sigma / np.sqrt(n))
    assert np.all(np.abs(ys.std(axis=0) - sigma) < 0.01 * sigma * 4)


def test_nonfinite_dynamics_raise():
    from lib.myutil import ModelEvalError
    model = SystemModel("bad", lambda x, u: x * np.inf, lambda x: x, np.eye(1), np.eye(1), 1, 1, 1)
    with pytest.raises(ModelEvalError):
        model.dyn([1.0], [0.0])


def test_covariances_must_be_spd():
    with pytest.raises(ConfigError):
        SystemModel("bad", lambda x, u: x, lambda x: x, np.zeros((1, 1)), np.eye(1), 1, 1, 1)


# -------------------------------------------------
# Linearization

def test_linear_fd_jacobian_is_A():
    A = np.random.default_rng(3).standard_normal((3, 3))
    model = SystemModel("lin", lambda x, u: A @ x + u.sum(), lambda x: x[:2], np.eye(3), np.eye(2), 3, 1, 2)
    phi, H = linearize(model, [0.4, -1.2, 2.0], [0.3])
    np.testing.assert_allclose(phi, A, atol=1e-8)
    np.testing.assert_allclose(H, np.eye(3)[:2], atol=1e-8)


def test_example1_phi_is_identity(example1):
    phi, H = linearize(example1.M[1], [5.0, -3.0], [0.2, 0.9])
    np.testing.assert_array_equal(phi, np.eye(2))
    np.testing.assert_array_equal(H, np.eye(2))


def test_tank_analytic_jacobian_matches_fd():
    scenario = build_scenario("two_tank", ScenarioConfig(scenario="two_tank"))
    u = np.array([0.5])
    for model in scenario.M:
        x = np.array([1.0, 0.8])
        fd = fd_jacobian(lambda z: model.f_dyn(z, u), x)
        np.testing.assert_allclose(model.f_jac_dyn(x, u), fd, atol=1e-5)


def test_tank_jacobian_on_probe_points():
    scenario = build_scenario("two_tank", ScenarioConfig(scenario="two_tank"))
    rng = np.random.default_rng(11)
    model = scenario.M[2]
    for _ in range(100):
        x = rng.uniform(0.5, 1.5, size=2)
        u = rng.uniform(0.0, 1.0, size=1)
        analytic = model.f_jac_dyn(x, u)
        fd = fd_jacobian(lambda z: model.f_dyn(z, u), x)
        assert np.max(np.abs(analytic - fd)) <= 1e-4 * max(1.0, np.max(np.abs(analytic)))


def test_rk4_exact_for_linear_growth():
    x = rk4(lambda x, u: u, np.array([0.0]), np.array([2.0]), 1.5, substeps=3)
    np.testing.assert_allclose(x, [3.0])


# -------------------------------------------------
# MRP shadow set

def test_mrp_shadow_examples():
    np.testing.assert_allclose(mrp_shadow([2.0, 0.0, 0.0]), [-0.5, 0.0, 0.0])
    np.testing.assert_array_equal(mrp_shadow([0.3, 0.1, 0.0]), [0.3, 0.1, 0.0])
    np.testing.assert_array_equal(mrp_shadow([1.0, 0.0, 0.0]), [1.0, 0.0, 0.0])
    np.testing.assert_array_equal(mrp_shadow([0.0, 0.0, 0.0]), [0.0, 0.0, 0.0])


def test_mrp_shadow_map_is_an_involution():
    rng = np.random.default_rng(5)
    for _ in range(100):
        sigma = rng.standard_normal(3)
        sigma *= rng.uniform(1.01, 5.0) / np.linalg.norm(sigma)
        s = mrp_shadow(sigma)
        assert np.linalg.norm(s) < 1.0
        np.testing.assert_allclose(-s / (s @ s), sigma, rtol=1e-12)


def test_satellite_attitude_stays_in_unit_ball():
    scenario = build_scenario("mars_satellite", ScenarioConfig(scenario="mars_satellite"))
    x = np.array([0.9, 0.3, 0.2, 0.5, 0.5, 0.5])
    for _ in range(20):
        x = scenario.M[0].dyn(x, [1.0, 1.0, 1.0])
        assert np.linalg.norm(x[:3]) <= 1.0


# -------------------------------------------------
# Scenarios

@pytest.mark.parametrize("name,size", [("two_tank", 4), ("mars_satellite", 4), ("example1", 2)])
def test_scenario_sizes(name, size):
    scenario = build_scenario(name, ScenarioConfig(scenario=name))
    assert len(scenario.M) == size
    assert scenario.truth_in_M


def test_satellite_labels():
    scenario = build_scenario("mars_satellite", ScenarioConfig(scenario="mars_satellite"))
    assert scenario.M.labels == ["0", "1", "2", "3"]
    assert scenario.M[2].params["eta"] == [1.0, 0.5, 1.0]


def test_unknown_scenario():
    with pytest.raises(ConfigError):
        build_scenario("three_tank", ScenarioConfig())


def test_negative_leak_is_rejected():
    with pytest.raises(ConfigError):
        build_scenario("two_tank", ScenarioConfig(scenario="two_tank", fault_params={"c_leak": -0.1}))


def test_truth_draws_follow_pi_star():
    always = ScenarioConfig(scenario="two_tank", pi_star=1.0)
    never = ScenarioConfig(scenario="two_tank", pi_star=0.0)
    for seed in range(20):
        assert build_scenario("two_tank", always, rng=np.random.default_rng(seed)).truth_in_M
        scenario = build_scenario("two_tank", never, rng=np.random.default_rng(seed))
        assert not scenario.truth_in_M
        assert scenario.h_star.label not in scenario.M


def test_truth_by_label_and_index():
    cfg = ScenarioConfig(scenario="mars_satellite")
    assert build_scenario("mars_satellite", cfg, truth="2").truth_index == 2
    assert build_scenario("two_tank", ScenarioConfig(), truth="2").truth_label == "leak_12"
    assert build_scenario("two_tank", ScenarioConfig(), truth="leak_2").truth_index == 3
    with pytest.raises(ConfigError):
        build_scenario("two_tank", ScenarioConfig(), truth="leak_3")


def test_zero_mismatch_keeps_dynamics():
    cfg = ScenarioConfig(scenario="mars_satellite")
    plain = build_scenario("mars_satellite", cfg, truth=1)
    mism = build_scenario("mars_satellite", cfg, truth=1, mismatch_rng=np.random.default_rng(3))
    x, u = np.array([0.1, 0.2, -0.1, 0.01, 0.0, -0.02]), np.array([0.5, -1.0, 0.3])
    np.testing.assert_array_equal(plain.h_star.dyn(x, u), mism.h_star.dyn(x, u))


def test_noise_scale_multiplies_R():
    base = build_scenario("example1", ScenarioConfig(scenario="example1"))
    loud = build_scenario("example1", ScenarioConfig(scenario="example1", noise_scale=2.0))
    np.testing.assert_allclose(loud.M[0].R, 2.0 * base.M[0].R)
    np.testing.assert_allclose(loud.M[0].Q, base.M[0].Q)


def test_identical_hypotheses_are_rejected(example1):
    copy = example1.M[0].with_noise(label="copy")
    with pytest.raises(ConfigError):
        HypothesisSet([example1.M[0], copy], probes=probe_points(2, 2))
    assert len(HypothesisSet([example1.M[0], copy], f_distinct=False)) == 2


# -------------------------------------------------
# Config and control sets

def test_config_override_returns_copy():
    cfg = ScenarioConfig()
    other = cfg.override(**{"fid.N": 25, "horizon": 50, "fid.alpha": None})
    assert other.fid["N"] == 25 and other.horizon == 50 and other.fid["alpha"] == 0.05
    assert cfg.fid["N"] == 10 and cfg.horizon == 200


@pytest.mark.parametrize("kwargs", [{"pi_star": 1.5}, {"fid": {"alpha": 0.0}}, {"fid": {"N": 0}},
                                    {"bogus": 1}, {"fid": {"bogus": 1}}, {"experiment": {"trials": 0}}])
def test_config_validation(kwargs):
    with pytest.raises(ConfigError):
        ScenarioConfig(**kwargs)


def test_config_from_json(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text('{"version": 1, "scenario": "example1", "fid": {"N": 7}}')
    cfg = ScenarioConfig.from_json(str(path))
    assert cfg.scenario == "example1" and cfg.fid["N"] == 7 and cfg.fid["b_th"] == 0.95


def test_control_box():
    box = ControlBox.from_bounds([[0.0, 1.0], [-1.0, 1.0]])
    assert box.grid(3).shape == (9, 2)
    np.testing.assert_allclose(box.grid(3)[0], [0.0, -1.0])
    np.testing.assert_allclose(box.scaled(0.5).upper, [0.5, 0.5])
    np.testing.assert_allclose(box.clip([2.0, -3.0]), [1.0, -1.0])
    assert box.contains([1.0, 0.0])
    assert not box.contains([1.1, 0.0])
    assert box.to_list() == [[0.0, 1.0], [-1.0, 1.0]]
    assert ControlBox([0.0], [0.0]).grid(9).shape == (1, 1)
    with pytest.raises(ConfigError):
        ControlBox([1.0], [0.0])
    with pytest.raises(ConfigError):
        ControlBox([0.0], [np.inf])


def test_control_sources():
    seq = as_control_source([[1.0], [2.0]], 1)
    assert isinstance(seq, SequencePolicy)
    assert seq(0, None)[0] == 1.0 and seq(5, None)[0] == 2.0
    assert as_control_source([0.5, 0.5], 2)(3, None).tolist() == [0.5, 0.5]
    with pytest.raises(DimensionError):
        as_control_source([0.5, 0.5, 0.5], 2)
