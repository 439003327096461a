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

NULL_BIN = "NULL"


class MyHist(object):
    """
    Histogram over a fixed, ordered set of bins (hypothesis labels plus NULL).
    Histograms are plain count lists aligned with binids so they can be
    merged across trials in a deterministic order.
    """
    def __init__(self, binids):
        self.binids = list(binids)

        self.ids = [i for i, _ in enumerate(self.binids)]
        self.bin2id = dict([(binid, i) for i, binid in enumerate(self.binids)])
        self.id2bin = dict([(i, binid) for i, binid in enumerate(self.binids)])

    @staticmethod
    def for_labels(labels):
        return MyHist(list(labels) + [NULL_BIN])

    def empty(self):
        return [0 for _ in self.binids]

    def delta(self, key):
        hist = self.empty()
        return self.inc_insert(hist, key, 1)

    def inc_insert(self, hist, key, value):
        # NOTE: unknown labels raise KeyError
        hist[self.bin2id[key]] += value
        return hist

    def merge(self, hist1, hist2):
        return [i + j for i, j in zip(hist1, hist2)]

    def merges(self, hists):
        acc = self.empty()
        for hist in hists:
            acc = self.merge(acc, hist)
        return acc

    def to_dict(self, hist):
        return dict([(self.id2bin[i], cnt) for i, cnt in enumerate(hist)])

