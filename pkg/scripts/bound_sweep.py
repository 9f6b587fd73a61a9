"""Check observed growth + 3 stderr >= bound base over a family x alpha x std grid."""
import argparse

from trajgrowth.experiment import ExperimentConfig, TrajectorySource, export_csv, run_experiment


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--width", type=int, default=100)
    p.add_argument("--depth", type=int, default=10)
    p.add_argument("--segments", type=int, default=1000)
    p.add_argument("--replicates", type=int, default=20)
    p.add_argument("--out", default="bound_sweep.csv")
    args = p.parse_args()
    cfg = ExperimentConfig(width=args.width, depth=args.depth,
                           families=["gaussian", "uniform", "discrete"],
                           alphas=[0.25, 0.5, 1.0], scales=[1.0, 2.0, 4.0],
                           trajectory=TrajectorySource("random_line", dim=args.width),
                           segments=args.segments, replicates=args.replicates, seed=1)
    res = run_experiment(cfg)
    export_csv(res, args.out, summary=True)
    violations = 0
    for c in res.cells:
        ok = c.growth + 3 * c.growth_stderr >= c.bound_base
        violations += not ok
        print(f"{'ok ' if ok else 'BAD'} {c.family:9s} a={c.alpha:<5} std={c.scale:<4} "
              f"growth={c.growth:.4f}+-{c.growth_stderr:.4f} bound={c.bound_base:.4f}")
    print(f"{violations} violations; table written to {args.out}")


if __name__ == "__main__":
    main()
