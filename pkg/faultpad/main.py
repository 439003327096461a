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

import argparse
import json
import os
import sys

from estim.trace import FilterTrace
from harness.studies import compare, diagnose, point_from_config, run_single
from harness.sweep import ablate, run_mismatch_study, run_sweep
from harness.utils import mkdir_p
from lib.myutil import FidError
from models.config import ScenarioConfig

"""
[Note]

Top-level entry-point for fault identification experiments.

    python main.py run -c ../configs/example1.json --mode active -v
    python main.py sweep -c ../configs/two_tank.json --workers 8 --plots
"""


def load_config(args):
    cfg = ScenarioConfig.from_json(args.config) if args.config else ScenarioConfig()
    kw = {"fid.N": args.N,
          "horizon": args.K,
          "fid.alpha": args.alpha,
          "fid.b_th": args.b_th,
          "experiment.seed": args.seed,
          "fid.renorm": False if args.no_renorm else None,
          "fid.reject": False if args.no_reject else None,
          "design.grid_per_axis": args.grid_per_axis,
          "design.refine_iters": args.refine_iters,
          "experiment.trials": args.trials,
          "experiment.workers": args.workers,
          "noise_scale": args.noise_scale,
          "experiment.plots": True if args.plots else None}
    if args.authority_scale is not None:
        kw["experiment.authority_scale"] = [args.authority_scale]
    if args.command in ["sweep", "ablate", "mismatch"]:
        # single values narrow the sweep lists
        if args.N is not None:
            kw["experiment.N_list"] = [args.N]
        if args.noise_scale is not None:
            kw["experiment.noise_list"] = [args.noise_scale]
        if args.mode is not None:
            kw["experiment.modes"] = [args.mode]
        if args.no_renorm or args.no_reject:
            kw["experiment.ablations"] = [{"renorm": not args.no_renorm, "reject": not args.no_reject}]
    return cfg.override(**kw)


def main(argv=None):
    argparser = argparse.ArgumentParser()
    argparser.add_argument('command', choices=['run', 'sweep', 'diagnose', 'ablate', 'mismatch', 'compare'],
                           help='what to do')
    argparser.add_argument('-c', '--config', type=str, default=None, help='scenario config (JSON)')

    # Identification args
    argparser.add_argument('--N', type=int, default=None, help='window length')
    argparser.add_argument('--K', type=int, default=None, help='horizon')
    argparser.add_argument('--alpha', type=float, default=None, help='chi-square test significance')
    argparser.add_argument('--b-th', dest='b_th', type=float, default=None, help='belief threshold')
    argparser.add_argument('--mode', type=str, default=None, choices=['passive', 'active'], help='passive or active')
    argparser.add_argument('--no-renorm', dest='no_renorm', action='store_true', help='skip belief renormalization')
    argparser.add_argument('--no-reject', dest='no_reject', action='store_true', help='skip chi-square rejection')

    # Input design args
    argparser.add_argument('--grid-per-axis', dest='grid_per_axis', type=int, default=None, help='grid points per axis')
    argparser.add_argument('--refine-iters', dest='refine_iters', type=int, default=None, help='local refinement passes')
    argparser.add_argument('--authority-scale', dest='authority_scale', type=float, default=None,
                           help='multiplies the bounds of U_a')

    # Experiment args
    argparser.add_argument('--seed', type=int, default=None, help='master seed')
    argparser.add_argument('--trials', type=int, default=None, help='trials per sweep point')
    argparser.add_argument('--workers', type=int, default=None, help='worker processes')
    argparser.add_argument('--noise-scale', dest='noise_scale', type=float, default=None, help='measurement noise scale')
    argparser.add_argument('--truth', type=str, default=None, help='true fault: label, index or unmodeled')
    argparser.add_argument('--trial', type=int, default=0, help='trial index for run/compare')

    # Output args
    argparser.add_argument('--trace', action='store_true', help='write per-trial traces')
    argparser.add_argument('--trace-filters', dest='trace_filters', action='store_true', help='write filter trace CSV')
    argparser.add_argument('--plots', action='store_true', help='write static plots')
    argparser.add_argument('--out', type=str, default=None, help='output directory')
    argparser.add_argument('-v', '--verbose', action='store_true', help='verbose')
    args = argparser.parse_args(argv)

    try:
        cfg = load_config(args)
        out_dir = args.out or os.path.join("results", cfg.experiment["name"] or cfg.scenario)

        if args.command == 'run':
            point = point_from_config(cfg, mode=args.mode or "passive")
            tracer = FilterTrace() if args.trace_filters else None
            result, path = run_single(cfg, point, trial=args.trial, truth=args.truth,
                                      out_dir=out_dir if args.trace else None, tracer=tracer)
            print("Truth {} (in M: {})".format(result.truth, result.truth_in_M))
            print("{}  failure={}".format(result.decision, result.failure))
            if path:
                print("Trace: {}".format(path))
            if tracer is not None:
                tpath = os.path.join(mkdir_p(out_dir), "filters_trial_{}.csv".format(args.trial))
                tracer.to_csv(tpath)
                print("Filter trace: {}".format(tpath))
        elif args.command == 'sweep':
            df = run_sweep(cfg, out_dir=out_dir, workers=args.workers, f_verbose=args.verbose,
                           f_traces=args.trace)
            print(df.to_string())
        elif args.command == 'ablate':
            df = ablate(cfg, out_dir=out_dir, workers=args.workers, f_verbose=args.verbose)
            print(df.to_string())
        elif args.command == 'mismatch':
            df = run_mismatch_study(cfg, out_dir=out_dir, workers=args.workers, f_verbose=args.verbose)
            print(df.to_string())
        elif args.command == 'diagnose':
            out = diagnose(cfg, truth=args.truth, trials=args.trials, out_dir=out_dir)
            print(json.dumps({k: v for k, v in out.items() if k not in ("lambda_per_k", "ks")}, indent=2))
        elif args.command == 'compare':
            results = compare(cfg, trial=args.trial, truth=args.truth, out_dir=out_dir, f_plots=args.plots)
            for mode, res in results.items():
                print("{:8s} truth={} {} failure={}".format(mode, res.truth, res.decision, res.failure))
    except FidError as e:
        print("error: {}".format(e.msg), file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
