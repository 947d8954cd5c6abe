"""Empirical P(||Ta|| <= delta) against the small-norm bound on a (k, delta) grid."""

import argparse
import json

import numpy as np

from rpmem.bounds import small_norm_prob_bound
from rpmem.linalg import Distribution, ProjectionSpec, apply, derive_seed, sample_projection


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=10**6)
    ap.add_argument("--chunks", type=int, default=10)
    ap.add_argument("--m", type=int, default=4)
    ap.add_argument("--ks", type=int, nargs="+", default=[3, 5, 10, 20])
    ap.add_argument("--deltas", type=float, nargs="+", default=[0.1, 0.3, 0.5])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    a = np.random.default_rng(args.seed).normal(size=args.m)
    a /= np.linalg.norm(a)
    rows = []
    for k in args.ks:
        norms = []
        for c in range(args.chunks):
            spec = ProjectionSpec(args.m, k * (args.samples // args.chunks), Distribution.GAUSSIAN,
                                  seed=derive_seed(args.seed + k, c))
            img = apply(sample_projection(spec), a).reshape(-1, k)
            norms.append(np.sqrt(np.sum(img * img, axis=1)))
        norms = np.concatenate(norms)
        for delta in args.deltas:
            emp = float(np.mean(norms <= delta))
            bound = small_norm_prob_bound(k, delta)
            rows.append({"k": k, "delta": delta, "empirical": emp, "bound": bound, "dominated": emp <= bound})
    print(json.dumps(rows, indent=1))


if __name__ == "__main__":
    main()
