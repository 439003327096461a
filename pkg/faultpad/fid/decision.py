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


"""
[Note]

Decision m^ID in M u {NULL} and the failure indicator

    F = 1  if (m^ID != h* and h* in M) or (m^ID != NULL and h* not in M)
"""


NULL = "NULL"


class Decision(object):
    def __init__(self, index, label, k, belief):
        self.index = index          # None for NULL
        self.label = label
        self.k = k
        self.belief = belief

    @staticmethod
    def identified(index, M, k, belief):
        return Decision(index, M.labels[index], k, belief)

    @staticmethod
    def null(k, belief):
        return Decision(None, NULL, k, belief)

    @property
    def is_null(self):
        return self.index is None

    def to_dict(self):
        return {"outcome": self.label, "index": self.index, "k": self.k,
                "belief": None if self.belief is None else self.belief.tolist()}

    def __repr__(self):
        if self.is_null:
            return "Decision(NULL, k={})".format(self.k)
        return "Decision({}, k={})".format(self.label, self.k)


def failure_indicator(decision, h_star, M):
    """h_star is the true SystemModel (or its label); membership goes by label."""
    label = getattr(h_star, "label", h_star)
    if label in M:
        return int(decision.is_null or decision.label != label)
    return int(not decision.is_null)
