"""Run the verification suites and print a one-line summary per check.

    python scripts/run_verify.py --out runs/default
    python scripts/run_verify.py --suites geometry,split --trials 100
"""
import argparse
import sys

from conegeo.config import parse_overrides
from conegeo.harness import SUITES, ExperimentConfig, run_suite


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--suites", default=",".join(SUITES))
    p.add_argument("--seed", type=int, default=ExperimentConfig.seed)
    p.add_argument("--trials", type=int, default=ExperimentConfig.trials)
    p.add_argument("--groups", type=int, default=ExperimentConfig.groups)
    p.add_argument("--out")
    p.add_argument("--tol", action="append", default=[])
    args = p.parse_args()

    cfg = ExperimentConfig(seed=args.seed, trials=args.trials, groups=args.groups,
                           suites=tuple(s for s in args.suites.split(",") if s),
                           tol_overrides=parse_overrides(args.tol), out=args.out)
    rep = run_suite(cfg)
    for c in rep.checks:
        tag = "ok  " if c.passed else "FAIL"
        margin = "-" if c.worst_margin is None else f"{c.worst_margin:+.2e}"
        print(f"{tag} {c.id:28s} n={c.instances:<5d} margin={margin:>10s} {c.runtime:6.1f}s  {c.error or ''}")
    print(rep.counts())
    return 0 if rep.passed else 1


if __name__ == "__main__":
    sys.exit(main())
