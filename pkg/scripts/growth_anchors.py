"""Dense and half-sparse growth anchors next to their bounds and the mean-field value.

For zero-mean weights with variance s^2/k, E[ratio^2] per layer is about
alpha s^2 / 2, so sqrt(alpha/2) s is a cheap reference for the observed mean.
"""
import argparse
import math

from trajgrowth.experiment import ExperimentConfig, run_experiment
from trajgrowth.figures import mnist_or_random


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--width", type=int, default=784)
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--segments", type=int, default=2000)
    p.add_argument("--replicates", type=int, default=20)
    p.add_argument("--std", type=float, default=2.0)
    p.add_argument("--source", choices=["auto", "mnist", "random"], default="auto")
    args = p.parse_args()
    cfg = ExperimentConfig(width=args.width, depth=args.depth,
                           families=["gaussian", "uniform", "discrete"], alphas=[0.5, 1.0],
                           scales=[args.std], trajectory=mnist_or_random(args.source),
                           segments=args.segments, replicates=args.replicates)
    print("family    alpha  growth   stderr   rms_ref  bound")
    for c in run_experiment(cfg).cells:
        ref = math.sqrt(c.alpha / 2) * args.std
        print(f"{c.family:9s} {c.alpha:5.2f}  {c.growth:.4f}  {c.growth_stderr:.4f}  "
              f"{ref:.4f}   {c.bound_base:.4f}")


if __name__ == "__main__":
    main()
