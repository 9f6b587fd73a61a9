"""Command line entry point: simulate, bounds, verify, figure, idx-info."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .bounds import base_for_spec, base_prior_dense
from .distributions import FAMILIES, std_dev, with_family_std
from .experiment import ExperimentConfig, TrajectorySource, export_csv, run_experiment, to_csv
from .figures import FIGURES, PRESETS, reproduce_figure
from .idx import load_idx
from .verify import run_all


def _floats(s: str) -> list[float]:
    return [float(v) for v in s.split(",") if v]


def cmd_simulate(args) -> int:
    cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    overrides = {k: getattr(args, k) for k in ("width", "depth", "segments", "replicates",
                                               "seed", "workers") if getattr(args, k) is not None}
    if args.families:
        overrides["families"] = args.families.split(",")
    if args.alphas:
        overrides["alphas"] = _floats(args.alphas)
    if args.scales:
        overrides["scales"] = _floats(args.scales)
    if args.trajectory:
        overrides["trajectory"] = TrajectorySource(args.trajectory, dim=args.dim or 784,
                                                   path=args.mnist)
    cfg = ExperimentConfig.from_dict({**cfg.to_dict(), **overrides})
    result = run_experiment(cfg)
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        export_csv(result, out, summary=args.summary)
        out.with_suffix(".json").write_text(result.to_json())
    else:
        sys.stdout.write(to_csv(result, summary=args.summary))
    return 0


def cmd_bounds(args) -> int:
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["family", "alpha", "family_std", "mixture_std", "k", "bound_base",
                "prior_order_of_magnitude"])
    for fam in args.families.split(","):
        for a in _floats(args.alphas):
            for s in _floats(args.scales):
                for k in [int(v) for v in args.k.split(",")]:
                    spec = with_family_std(fam, s, a, scale_by_inv_sqrt_k=not args.unscaled)
                    prior = (base_prior_dense(s / np.sqrt(k) if not args.unscaled else s, k).base
                             if fam == "gaussian" and a == 1.0 else "")
                    w.writerow([fam, a, s, std_dev(spec), k, repr(base_for_spec(spec, k).base),
                                prior])
    return 0


def cmd_verify(args) -> int:
    reports = run_all(seed=args.seed, quick=args.quick)
    failed = [r for r in reports if not r.passed]
    for r in reports:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.lemma:22s} {r.rule}")
    print(f"{len(reports) - len(failed)}/{len(reports)} checks passed")
    if args.json:
        Path(args.json).write_text(json.dumps([r.to_dict() for r in reports], indent=1))
    return 1 if failed else 0


def cmd_figure(args) -> int:
    for p in reproduce_figure(args.name, args.scale, args.outdir, args.seed, args.source):
        print(p)
    return 0


def cmd_idx_info(args) -> int:
    arr = load_idx(args.path)
    print(f"path:  {args.path}")
    print(f"dtype: {arr.dtype}")
    print(f"shape: {arr.shape}")
    if arr.size:
        print(f"min/max: {arr.min()} / {arr.max()}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="trajgrowth", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run a sweep of replicated growth experiments")
    s.add_argument("--config", help="YAML experiment config (version: 1)")
    for name in ("width", "depth", "segments", "replicates", "seed", "workers", "dim"):
        s.add_argument(f"--{name}", type=int)
    s.add_argument("--families", help=f"comma list from {','.join(FAMILIES)}")
    s.add_argument("--alphas", help="comma list of sparsity values")
    s.add_argument("--scales", help="comma list of family standard deviations (unscaled)")
    s.add_argument("--trajectory", choices=["mnist_line", "random_line", "random_arc"])
    s.add_argument("--mnist", help="path to an MNIST IDX image file")
    s.add_argument("--summary", action="store_true", help="one row per cell instead of per layer")
    s.add_argument("--out", help="CSV path (a .json result is written next to it)")
    s.set_defaults(func=cmd_simulate)

    b = sub.add_parser("bounds", help="print lower-bound bases for a parameter grid")
    b.add_argument("--families", default=",".join(FAMILIES))
    b.add_argument("--alphas", default="0.25,0.5,1")
    b.add_argument("--scales", default="1,2,4")
    b.add_argument("--k", default="784")
    b.add_argument("--unscaled", action="store_true", help="no 1/sqrt(k) weight scaling")
    b.set_defaults(func=cmd_bounds)

    v = sub.add_parser("verify", help="run every lemma check; exit 1 on any failure")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--quick", action="store_true")
    v.add_argument("--json", help="write the reports as JSON")
    v.set_defaults(func=cmd_verify)

    f = sub.add_parser("figure", help="reproduce a figure as CSV + SVG")
    f.add_argument("name", choices=FIGURES)
    f.add_argument("--scale", choices=list(PRESETS), default="desk")
    f.add_argument("--outdir", default="figures")
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--source", choices=["auto", "mnist", "random"], default="auto")
    f.set_defaults(func=cmd_figure)

    i = sub.add_parser("idx-info", help="describe an IDX dataset file")
    i.add_argument("path")
    i.set_defaults(func=cmd_idx_info)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
