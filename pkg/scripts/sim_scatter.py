"""Sweep bounded representations and record (log|H|, log Sim) pairs.

Writes a CSV and prints the smallest alpha with log Sim <= alpha log|H| seen
in the sweep (the finite-group bound says alpha = 2 always works).

    python scripts/sim_scatter.py --per-spec 20 --out sim_scatter.csv
"""
import argparse
import csv

import numpy as np

from conegeo.harness import CATALOG, gen_bounded_rep
from conegeo.matgroups import group_size_norm
from conegeo.unitarize import similarity_number


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--per-spec", type=int, default=10)
    p.add_argument("--cond-max", type=float, default=8.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="sim_scatter.csv")
    args = p.parse_args()

    rng = np.random.default_rng(args.seed)
    rows = []
    for spec in CATALOG:
        for k in range(args.per_spec):
            cond = float(rng.uniform(1.0, args.cond_max))
            rep, _ = gen_bounded_rep(spec, cond, seed=args.seed * 1000 + k)
            ls = float(np.log(group_size_norm(rep.images)))
            lsim = float(np.log(similarity_number(rep.generators).sim_value))
            rows.append((spec, cond, ls, lsim))

    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["spec", "cond", "log_size", "log_sim"])
        w.writerows(rows)

    ratios = [lsim / ls for _, _, ls, lsim in rows if ls > 1e-9]
    print(f"{len(rows)} representations -> {args.out}")
    if ratios:
        print(f"log Sim / log|H|: min {min(ratios):.4f}  median {np.median(ratios):.4f}  max {max(ratios):.4f}")


if __name__ == "__main__":
    main()
