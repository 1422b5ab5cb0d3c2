"""Exploratory sweep: does ||e^{X0}|| ||e^{-X0}|| still match Sim(pi_1) when
the expectation is a group average with ||I - E|| > 1?

Nothing is asserted.  Instances where the ratio moves away from 1 are printed
as candidates and all rows go to a JSON-lines file.

    python scripts/thmacs_explore.py --n 60 --out thmacs_explore.jsonl
"""
import argparse
import json

import numpy as np

from conegeo.harness import unitary_generators
from conegeo.harness.rng import make_rng, rand_invertible, rand_unitary
from conegeo.matgroups import close_group
from conegeo.splitexp import group_average_expectation, thmacs_check

SPECS = {3: "s3", 4: "dihedral:4*2", 5: "cyclic:5"}


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--n", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scale", type=float, default=0.5)
    p.add_argument("--out", default="thmacs_explore.jsonl")
    args = p.parse_args()

    found = 0
    with open(args.out, "w") as fh:
        for i in range(args.n):
            rng = make_rng(args.seed, "explore", i)
            dim = int(rng.integers(3, 6))
            U = rand_unitary(rng, dim)
            gens = [U @ g @ U.conj().T for g in unitary_generators(SPECS[dim])]
            E = group_average_expectation(close_group(gens))
            g = rand_invertible(rng, dim, args.scale)
            rep = thmacs_check(g, E.data, E, (dim,), full=False, norm_samples=300)
            row = {"instance": i, "dim": dim, "spec": SPECS[dim], **rep.to_json()}
            fh.write(json.dumps(row) + "\n")
            if abs(rep.ratio - 1) > 1e-3:
                found += 1
                lo, hi = rep.complement_norm
                print(f"candidate {i}: dim {dim}  lhs/rhs = {rep.ratio:.5f}  ||I - E|| in [{lo:.3f}, {hi:.3f}]")
    print(f"{found} of {args.n} instances with |lhs/rhs - 1| > 1e-3 -> {args.out}")


if __name__ == "__main__":
    main()
