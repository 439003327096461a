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

import datetime
import json
import os
import sys
import time

import numpy as np
import psutil


"""
[Note]

Experiment utility classes and functions
"""


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    raise TypeError("Not JSON serializable: {}".format(type(obj)))


class ResultLogger(object):
    """JSON lines: the first line holds the keyword arguments of the run."""
    def __init__(self, path, *args, **kwargs):
        self.f_log = open(path, 'w')
        self.f_log.write(json.dumps(kwargs, default=_jsonable) + '\n')

    def log(self, **kwargs):
        self.f_log.write(json.dumps(kwargs, default=_jsonable) + '\n')
        self.f_log.flush()

    def close(self):
        self.f_log.close()

    def __enter__(self):
        return self

    def __exit__(self, *args):
        self.close()


def read_jsonl(path):
    with open(path, 'r') as f:
        return [json.loads(line) for line in f if line.strip()]


class Timer(object):
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *args):
        self.end = time.perf_counter()
        self.interval = self.end - self.start


def cpu_stats():
    print(sys.version)
    print("cpu count: {}  cpu percent: {}".format(psutil.cpu_count(), psutil.cpu_percent()))
    print(psutil.virtual_memory())
    py = psutil.Process(os.getpid())
    memory_use = py.memory_info()[0] / 2. ** 30
    print('memory GB:', memory_use)


def default_workers():
    return max(1, (psutil.cpu_count(logical=False) or psutil.cpu_count() or 1))


def curr_timestamp():
    ts = datetime.datetime.now().isoformat()
    ts = ts.replace(":", "")
    return ts


def mkdir_p(path):
    os.makedirs(path, exist_ok=True)
    return path
