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

from estim.ekf import FilterBank, FilterState, check_divergence, innovation_stat, predict, update
from estim.trace import FilterTrace
from lib.myutil import DivergenceError, InputError
from models.linear import make_linear_model
from models.system import HypothesisSet, SystemModel, measure, step_dynamics


def _random_spd(rng, n, scale=1.0):
    a = rng.standard_normal((n, n))
    return scale * (a @ a.T + n * np.eye(n))


def _random_linear(seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((2, 2))
    A *= 0.9 / np.max(np.abs(np.linalg.eigvals(A)))
    B = rng.standard_normal((2, 1))
    C = rng.standard_normal((2, 2))
    Q = _random_spd(rng, 2, 0.01)
    R = _random_spd(rng, 2, 0.01)
    return A, B, C, Q, R


# -------------------------------------------------
# Predict / update

def test_scalar_predict_update(scalar_model):
    fs = FilterState(np.array([0.0]), np.array([[1.0]]))
    ps = predict(fs, scalar_model, [0.5])
    np.testing.assert_allclose(ps.P_pred, [[2.0]])
    np.testing.assert_allclose(ps.S, [[3.0]])
    np.testing.assert_allclose(ps.K, [[2.0 / 3.0]])
    new = update(ps, ps.y_pred + 3.0)
    np.testing.assert_allclose(new.x, ps.x_pred + 2.0)
    np.testing.assert_allclose(new.P, [[2.0 / 3.0]])
    np.testing.assert_allclose(new.e, [3.0])


def test_zero_innovation_keeps_prediction(scalar_model):
    ps = predict(FilterState(np.array([1.0]), np.array([[1.0]])), scalar_model, [2.0])
    new = update(ps, ps.y_pred)
    np.testing.assert_array_equal(new.x, ps.x_pred)
    assert new.stat == 0.0


def test_first_step_is_update_only(scalar_model):
    ps = predict(FilterState(np.array([1.0]), np.array([[1.0]])), scalar_model, None)
    np.testing.assert_allclose(ps.x_pred, [1.0])
    np.testing.assert_allclose(ps.S, [[2.0]])


def test_nonfinite_measurement(scalar_model):
    ps = predict(FilterState(np.array([0.0]), np.array([[1.0]])), scalar_model, [0.0])
    with pytest.raises(InputError):
        update(ps, [np.nan])


def test_matches_kalman_oracle():
    A, B, C, Q, R = _random_linear(0)
    model = make_linear_model("lin", A, B, C, Q, R)
    rng = np.random.default_rng(42)
    x0, P0 = np.zeros(2), np.eye(2)
    x_true = rng.multivariate_normal(x0, P0)

    fs = FilterState(x0.copy(), P0.copy())
    xo, Po = x0.copy(), P0.copy()
    u = None
    for k in range(50):
        if k > 0:
            x_true = step_dynamics(model, x_true, u, rng)
        y = measure(model, x_true, rng)

        # oracle: textbook Kalman filter with explicit inverses
        if u is not None:
            xo = A @ xo + B @ u
            Po = A @ Po @ A.T + Q
        So = C @ Po @ C.T + R
        Ko = Po @ C.T @ np.linalg.inv(So)
        eo = y - C @ xo
        xo = xo + Ko @ eo
        Po = (np.eye(2) - Ko @ C) @ Po
        Po = 0.5 * (Po + Po.T)

        fs = update(predict(fs, model, u), y)
        np.testing.assert_allclose(fs.x, xo, rtol=0, atol=1e-10)
        np.testing.assert_allclose(fs.P, Po, rtol=0, atol=1e-10)
        np.testing.assert_allclose(fs.e, eo, rtol=0, atol=1e-10)
        np.testing.assert_allclose(fs.S, So, rtol=0, atol=1e-10)
        assert np.array_equal(fs.P, fs.P.T)
        u = rng.standard_normal(1)


def test_joseph_form_agrees_with_standard_form():
    A, B, C, Q, R = _random_linear(1)
    model = make_linear_model("lin", A, B, C, Q, R)
    ps = predict(FilterState(np.ones(2), np.eye(2)), model, [0.3])
    y = ps.y_pred + np.array([0.1, -0.2])
    np.testing.assert_allclose(update(ps, y).P, update(ps, y, f_joseph=True, R=R).P, atol=1e-10)


# -------------------------------------------------
# Innovation statistic and divergence

def test_innovation_stat_examples():
    assert innovation_stat([2.0], [[1.0]]) == pytest.approx(4.0)
    assert innovation_stat([1.0, 1.0], np.eye(2)) == pytest.approx(2.0)


def test_innovation_stat_against_inverse():
    rng = np.random.default_rng(9)
    for _ in range(50):
        n = rng.integers(1, 5)
        S = _random_spd(rng, n)
        e = rng.standard_normal(n)
        assert innovation_stat(e, S) == pytest.approx(e @ np.linalg.inv(S) @ e, rel=1e-10)


def test_innovation_stat_singular():
    with pytest.raises(DivergenceError):
        innovation_stat([1.0, 0.0], np.zeros((2, 2)))


def test_failed_predict_marks_filter_diverged(scalar_model):
    fs = FilterState(np.zeros(1), np.array([[np.nan]]))
    with pytest.raises(DivergenceError):
        predict(fs, scalar_model, [0.0], f_mark=False)
    assert not fs.diverged
    with pytest.raises(DivergenceError):
        predict(fs, scalar_model, [0.0])
    assert fs.diverged
    with pytest.raises(DivergenceError):
        predict(fs, scalar_model, [0.0], f_mark=False)


def test_check_divergence():
    fs = FilterState(np.zeros(2), np.eye(2))
    assert not check_divergence(fs, [1.0, 2.0])
    bad = FilterState(np.zeros(2), np.array([[np.nan, 0.0], [0.0, 1.0]]))
    assert check_divergence(bad, [])
    big = FilterState(np.zeros(2), 1e7 * np.eye(2))
    assert check_divergence(big, [], trace_cap=1e6)
    noisy = FilterState(np.zeros(2), np.eye(2))
    assert check_divergence(noisy, [5e3, 5e3], chi2_cap=1e3)
    # sticky
    noisy.P = np.eye(2)
    assert check_divergence(noisy, [0.1])


# -------------------------------------------------
# Consistency of the matched filter

def test_matched_filter_whiteness():
    A, B, C, Q, R = _random_linear(2)
    model = make_linear_model("lin", A, B, C, Q, R)
    rng = np.random.default_rng(2024)
    x0, P0 = np.zeros(2), 0.1 * np.eye(2)
    x = rng.multivariate_normal(x0, P0)
    fs = FilterState(x0.copy(), P0.copy())
    stats, white = [], []
    u = None
    for k in range(10000):
        if k > 0:
            x = step_dynamics(model, x, u, rng)
        y = measure(model, x, rng)
        fs = update(predict(fs, model, u), y)
        stats.append(fs.stat)
        white.append(np.linalg.solve(np.linalg.cholesky(fs.S), fs.e))
        assert not check_divergence(fs, stats[-10:])
        u = np.array([np.sin(0.05 * k)])
    assert abs(np.mean(stats) - 2.0) <= 0.05 * 2.0
    white = np.array(white)
    for j in range(2):
        z = white[:, j] - white[:, j].mean()
        rho = np.dot(z[1:], z[:-1]) / np.dot(z, z)
        assert abs(rho) < 0.05


# -------------------------------------------------
# Filter bank

def test_example1_filters_agree_without_axis2_input(example1):
    bank = FilterBank(example1.M, example1.x0_mean, example1.Sigma0)
    rng = np.random.default_rng(0)
    u = None
    for k in range(20):
        states = bank.step(u, rng.standard_normal(2))
        np.testing.assert_array_equal(states[0].y_pred, states[1].y_pred)
        np.testing.assert_array_equal(states[0].S, states[1].S)
        u = np.array([rng.uniform(-1, 1), 0.0])


def test_bank_of_identical_models_is_deterministic(example1):
    m = example1.M[0]
    M = HypothesisSet([m, m.with_noise(label="copy")], f_distinct=False)
    bank = FilterBank(M, example1.x0_mean, example1.Sigma0)
    rng = np.random.default_rng(1)
    u = None
    for k in range(10):
        states = bank.step(u, rng.standard_normal(2))
        np.testing.assert_array_equal(states[0].x, states[1].x)
        np.testing.assert_array_equal(states[0].P, states[1].P)
        u = rng.standard_normal(2)


def test_bank_flags_divergence():
    good = make_linear_model("good", [[0.5]], [[1.0]], [[1.0]], [[0.01]], [[0.01]])
    bad = SystemModel("bad", lambda x, u: 1e3 * x, lambda x: 0.0 * x, [[1e4]], [[0.01]], 1, 1, 1)
    M = HypothesisSet([good, bad])
    bank = FilterBank(M, [1.0], [[1.0]], trace_cap=1e6)
    for k in range(10):
        bank.step(None if k == 0 else [0.0], [1.0])
    assert list(bank.live) == [True, False]
    assert bank.diverged_steps > 0
    assert bank.predict_all([0.0])[1] is None


def test_filter_trace_rows(example1, tmp_path):
    tracer = FilterTrace()
    bank = FilterBank(example1.M, example1.x0_mean, example1.Sigma0, tracer=tracer)
    bank.step(None, [0.1, 0.2])
    bank.step([1.0, 0.0], [1.1, 0.2])
    df = tracer.to_df()
    assert len(df) == 4
    assert list(df["hypothesis"][:2]) == ["h_star", "m"]
    tracer.to_csv(str(tmp_path / "filters.csv"))
    assert (tmp_path / "filters.csv").exists()
