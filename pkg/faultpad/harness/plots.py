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

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

import numpy as np  # noqa: E402


"""
[Note]

Static plots built from the sweep table and single-trial traces. The CSV is
the contract; these are conveniences.
"""


def _series_key(row):
    return "{} renorm={} reject={} a={} auth={} noise={}".format(
        row["mode"], row["renorm"], row["reject"], row["alpha"], row["authority"], row["noise"])


def plot_sweep(df, path_prefix):
    """Failure rate and mean delay against N, one line per configuration."""
    df = df.copy()
    df["series"] = df.apply(_series_key, axis=1)
    paths = []
    for col, err, ylabel, suffix in [("failure_rate", "stderr", "failure rate", "failure"),
                                     ("avg_delay", "delay_std", "ID delay [steps]", "delay")]:
        fig, ax = plt.subplots(figsize=(6, 4))
        for series, grp in df.groupby("series", sort=False):
            grp = grp.sort_values("N")
            ax.errorbar(grp["N"], grp[col], yerr=grp[err], marker="o", capsize=3, label=series)
        ax.set_xlabel("window N")
        ax.set_ylabel(ylabel)
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize=6)
        fig.tight_layout()
        path = "{}_{}.png".format(path_prefix, suffix)
        fig.savefig(path, dpi=120)
        plt.close(fig)
        paths.append(path)
    return paths


def plot_compare(traces, labels, path):
    """Controls, beliefs and true states of several runs of the same trial."""
    fig, axes = plt.subplots(3, len(traces), figsize=(5 * len(traces), 8), squeeze=False, sharex=True)
    for col, (name, trace) in enumerate(traces.items()):
        ks = [rec["k"] for rec in trace]
        nu = next((len(rec["u"]) for rec in trace if rec["u"] is not None), 1)
        us = np.array([rec["u"] if rec["u"] is not None else [np.nan] * nu for rec in trace], dtype=float)
        bs = np.array([rec["belief"] for rec in trace])
        xs = np.array([rec["x_true"] for rec in trace])
        axes[0, col].step(ks, us, where="post")
        axes[0, col].set_title(name)
        axes[0, col].set_ylabel("u")
        for i, label in enumerate(labels):
            axes[1, col].plot(ks, bs[:, i], label=label)
        axes[1, col].set_ylabel("belief")
        axes[1, col].set_ylim(-0.05, 1.05)
        axes[1, col].legend(fontsize=7)
        axes[2, col].plot(ks, xs)
        axes[2, col].set_ylabel("x")
        axes[2, col].set_xlabel("k")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
