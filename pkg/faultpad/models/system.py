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

from lib.myutil import (ConfigError, DimensionError, LinearizationError, ModelEvalError,
                        as_vec, check_spd)


"""
[Note]

Fault-parameterized system interface:

    x_{k+1} = F_h(x_k, u_k) + w_k,     w_k ~ N(0, Q)
    y_k     = G(x_k) + v_k,            v_k ~ N(0, R)

A SystemModel is immutable after construction. Randomness only enters through
the generator handed to step_dynamics / measure.
"""


# -------------------------------------------------
# System model

class SystemModel(object):
    def __init__(self, label, f_dyn, f_meas, Q, R, nx, nu, ny,
                 f_jac_dyn=None, f_jac_meas=None, params=None):
        """
        f_dyn(x, u) -> x'             discrete dynamics F_h
        f_meas(x) -> y                measurement G
        f_jac_dyn(x, u) -> phi        optional analytic dF/dx
        f_jac_meas(x) -> H            optional analytic dG/dx
        params                        fault parameters, kept for reporting
        """
        self.label = str(label)
        self.nx = int(nx)
        self.nu = int(nu)
        self.ny = int(ny)
        self.f_dyn = f_dyn
        self.f_meas = f_meas
        self.f_jac_dyn = f_jac_dyn
        self.f_jac_meas = f_jac_meas
        self.params = dict(params or {})

        self.Q = check_spd(Q, "Q of {}".format(self.label))
        self.R = check_spd(R, "R of {}".format(self.label))
        if self.Q.shape != (self.nx, self.nx):
            raise DimensionError("Q of {} has shape {}".format(self.label, self.Q.shape))
        if self.R.shape != (self.ny, self.ny):
            raise DimensionError("R of {} has shape {}".format(self.label, self.R.shape))
        self.Q.setflags(write=False)
        self.R.setflags(write=False)

    def __repr__(self):
        return "SystemModel({}, nx={}, nu={}, ny={})".format(self.label, self.nx, self.nu, self.ny)

    def dyn(self, x, u):
        x = as_vec(x, self.nx, "state")
        u = as_vec(u, self.nu, "control")
        x_p = np.asarray(self.f_dyn(x, u), dtype=float).reshape(-1)
        if x_p.shape[0] != self.nx:
            raise DimensionError("{}: dynamics returned length {}".format(self.label, x_p.shape[0]))
        if not np.all(np.isfinite(x_p)):
            raise ModelEvalError("{}: non-finite dynamics at x={} u={}".format(self.label, x, u))
        return x_p

    def meas(self, x):
        x = as_vec(x, self.nx, "state")
        y = np.asarray(self.f_meas(x), dtype=float).reshape(-1)
        if y.shape[0] != self.ny:
            raise DimensionError("{}: measurement returned length {}".format(self.label, y.shape[0]))
        if not np.all(np.isfinite(y)):
            raise ModelEvalError("{}: non-finite measurement at x={}".format(self.label, x))
        return y

    def with_noise(self, Q=None, R=None, label=None):
        """Same dynamics and measurement with other covariances."""
        return SystemModel(label or self.label, self.f_dyn, self.f_meas,
                           self.Q if Q is None else Q, self.R if R is None else R,
                           self.nx, self.nu, self.ny, self.f_jac_dyn, self.f_jac_meas, self.params)


def step_dynamics(model, x, u, rng, f_noise=True):
    x_p = model.dyn(x, u)
    if f_noise:
        x_p = x_p + rng.multivariate_normal(np.zeros(model.nx), model.Q)
    return x_p


def measure(model, x, rng, f_noise=True):
    y = model.meas(x)
    if f_noise:
        y = y + rng.multivariate_normal(np.zeros(model.ny), model.R)
    return y


# -------------------------------------------------
# Linearization

def _fd_steps(x):
    return 1e-6 * np.maximum(1.0, np.abs(x))


def fd_jacobian(f, x):
    """Central finite differences of f at x, step 1e-6 * max(1, |x_i|)."""
    x = np.asarray(x, dtype=float)
    f0 = np.asarray(f(x), dtype=float).reshape(-1)
    jac = np.zeros((f0.shape[0], x.shape[0]))
    for i, h in enumerate(_fd_steps(x)):
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        jac[:, i] = (np.asarray(f(xp), dtype=float).reshape(-1) -
                     np.asarray(f(xm), dtype=float).reshape(-1)) / (2.0 * h)
    return jac


def jac_dyn(model, x, u):
    if model.f_jac_dyn is not None:
        phi = np.asarray(model.f_jac_dyn(x, u), dtype=float)
    else:
        phi = fd_jacobian(lambda z: model.f_dyn(z, u), x)
    if phi.shape != (model.nx, model.nx) or not np.all(np.isfinite(phi)):
        raise LinearizationError("{}: bad dynamics Jacobian at x={} u={}".format(model.label, x, u))
    return phi


def jac_meas(model, x):
    if model.f_jac_meas is not None:
        H = np.asarray(model.f_jac_meas(x), dtype=float)
    else:
        H = fd_jacobian(model.f_meas, x)
    H = np.atleast_2d(H)
    if H.shape != (model.ny, model.nx) or not np.all(np.isfinite(H)):
        raise LinearizationError("{}: bad measurement Jacobian at x={}".format(model.label, x))
    return H


def linearize(model, x, u):
    """
    Returns (phi, H): phi = dF/dx at (x, u) and H = dG/dx at the predicted
    state F(x, u).
    """
    x = as_vec(x, model.nx, "state")
    u = as_vec(u, model.nu, "control")
    phi = jac_dyn(model, x, u)
    H = jac_meas(model, model.dyn(x, u))
    return phi, H


# -------------------------------------------------
# Hypothesis set

def probe_points(nx, nu, count=16, seed=0):
    """Fixed probe grid used to check that hypotheses are distinct."""
    rng = np.random.default_rng(seed)
    xs = 0.5 + np.abs(rng.standard_normal((count, nx)))
    us = rng.standard_normal((count, nu))
    return list(zip(xs, us))


class HypothesisSet(object):
    """
    Ordered, labelled set M of modeled fault hypotheses.
    """
    def __init__(self, models, probes=None, tol=1e-12, f_distinct=True):
        self.models = list(models)
        if len(self.models) < 2:
            raise ConfigError("A hypothesis set needs at least 2 models, got {}".format(len(self.models)))
        self.labels = [m.label for m in self.models]
        if len(set(self.labels)) != len(self.labels):
            raise ConfigError("Hypothesis labels must be unique: {}".format(self.labels))
        m0 = self.models[0]
        for m in self.models[1:]:
            if (m.nx, m.nu, m.ny) != (m0.nx, m0.nu, m0.ny):
                raise DimensionError("{} and {} have different dimensions".format(m0.label, m.label))

        # f_distinct=False is only for degenerate sets built on purpose
        if f_distinct:
            if probes is None:
                probes = probe_points(m0.nx, m0.nu)
            self._check_distinct(probes, tol)

    def _check_distinct(self, probes, tol):
        evals = [[m.dyn(x, u) for x, u in probes] for m in self.models]
        for i in range(len(self.models)):
            for j in range(i + 1, len(self.models)):
                gap = max(np.max(np.abs(a - b)) for a, b in zip(evals[i], evals[j]))
                if gap <= tol:
                    raise ConfigError("Hypotheses {} and {} are identical on every probe point".format(
                                      self.labels[i], self.labels[j]))

    def __len__(self):
        return len(self.models)

    def __getitem__(self, idx):
        return self.models[idx]

    def __iter__(self):
        return iter(self.models)

    def index(self, label):
        return self.labels.index(label)

    def __contains__(self, model_or_label):
        label = getattr(model_or_label, "label", model_or_label)
        return label in self.labels

    @property
    def nx(self):
        return self.models[0].nx

    @property
    def nu(self):
        return self.models[0].nu

    @property
    def ny(self):
        return self.models[0].ny
