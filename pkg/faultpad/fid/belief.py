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


"""
[Note]

Belief over M and its Bayes update

    b_k(m) = p(I_k^N | m) b_{k-1}(m) / z

with the renormalization branch: when every hypothesis is rejected the
belief resets to 1/|M|. Weights are exp(l_m + log b_{k-1}(m) - max) so finite
mass never underflows to a zero sum.
"""


SIMPLEX_TOL = 1e-12


class Belief(object):
    def __init__(self, b):
        b = np.asarray(b, dtype=float).reshape(-1)
        if b.shape[0] < 1 or np.any(~np.isfinite(b)) or np.any(b < 0.0) or np.any(b > 1.0) or \
           abs(b.sum() - 1.0) > 1e-9:
            raise ConfigError("Belief must be a probability vector, got {}".format(b))
        self.b = b / b.sum()

    @staticmethod
    def uniform(n):
        return Belief(np.full(n, 1.0 / n))

    @staticmethod
    def initial(n, b0=None):
        if b0 is None:
            return Belief.uniform(n)
        belief = Belief(b0)
        if len(belief) != n:
            raise ConfigError("b0 has {} entries for {} hypotheses".format(len(belief), n))
        return belief

    def __len__(self):
        return self.b.shape[0]

    def __getitem__(self, i):
        return self.b[i]

    def argmax(self):
        return int(np.argmax(self.b))

    def max(self):
        return float(np.max(self.b))

    def tolist(self):
        return [float(v) for v in self.b]

    def __repr__(self):
        return "Belief({})".format(np.array2string(self.b, precision=4))


class BeliefUpdate(object):
    def __init__(self, belief, renormalized=False, survivor_reset=False):
        self.belief = belief
        self.renormalized = renormalized
        self.survivor_reset = survivor_reset


def belief_update(prior, logliks, f_renorm=True):
    """
    prior: Belief; logliks: window log-likelihood per hypothesis, -inf for
    rejected ones. With f_renorm=False the total-rejection branch leaves the
    belief unchanged.
    """
    ll = np.asarray(logliks, dtype=float).reshape(-1)
    if ll.shape[0] != len(prior):
        raise ConfigError("{} log-likelihoods for {} hypotheses".format(ll.shape[0], len(prior)))
    ll = np.where(np.isnan(ll), -np.inf, ll)
    alive = ll > -np.inf

    if not np.any(alive):
        if f_renorm:
            return BeliefUpdate(Belief.uniform(len(prior)), renormalized=True)
        return BeliefUpdate(prior)

    with np.errstate(divide='ignore'):
        logw = np.where(alive, ll + np.log(prior.b), -np.inf)
    if not np.any(logw > -np.inf):
        # every survivor already had zero weight
        if f_renorm:
            return BeliefUpdate(Belief(alive / alive.sum()), survivor_reset=True)
        return BeliefUpdate(prior)

    w = np.exp(logw - np.max(logw))
    return BeliefUpdate(Belief(w / w.sum()))
