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
import pandas as pd


"""
[Note]

Per-step filter trace for debugging: k, hypothesis, x_hat, trace(P), e^T S^-1 e.
"""


class FilterTrace(object):
    def __init__(self):
        self.rows = []

    def record(self, k, label, fs):
        self.rows.append({"k": k,
                          "hypothesis": label,
                          "x_hat": " ".join("{:.6g}".format(v) for v in fs.x),
                          "trace_P": float(np.trace(fs.P)),
                          "stat": fs.stat,
                          "diverged": fs.diverged})

    def to_df(self):
        return pd.DataFrame(self.rows, columns=["k", "hypothesis", "x_hat", "trace_P", "stat", "diverged"])

    def to_csv(self, path):
        self.to_df().to_csv(path, index=False)
