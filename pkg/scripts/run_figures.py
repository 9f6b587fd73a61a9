"""Regenerate every figure (CSV + SVG + JSON metadata) into one directory.

    python scripts/run_figures.py --scale desk --outdir figures
"""
import argparse
import logging
import time

from trajgrowth.figures import FIGURES, PRESETS, reproduce_figure


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--scale", choices=list(PRESETS), default="desk")
    p.add_argument("--outdir", default="figures")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--source", choices=["auto", "mnist", "random"], default="auto")
    p.add_argument("--only", nargs="*", choices=FIGURES)
    args = p.parse_args()
    logging.basicConfig(level=logging.INFO)
    for name in args.only or FIGURES:
        t = time.perf_counter()
        paths = reproduce_figure(name, args.scale, args.outdir, args.seed, args.source)
        print(f"{name}: {len(paths)} files in {time.perf_counter() - t:.1f}s")


if __name__ == "__main__":
    main()
