"""Fit the exponential rate constant C from empirical failure rates.

The synthetic class has failure probability exactly 2^-k, so its fitted
slope should come out near ln 2; the finite class is compared against
the configured default C_jl.
"""

import argparse
import json
import math

from rpmem.bounds import ConstantConfig
from rpmem.montecarlo import calibrate_C


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=20000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    syn = calibrate_C("synthetic", range(1, 7), args.trials, master_seed=args.seed)
    fin = calibrate_C("finite", [1, 2, 3, 4], args.trials, params={"m": 10, "size": 50}, master_seed=args.seed)
    print(f"synthetic: C_hat={syn.C_hat:.4f} (ln 2 = {math.log(2):.4f}) status={syn.status}")
    print(f"finite:    C_hat={fin.C_hat:.4f} (default C_jl = {ConstantConfig().C_jl:.4f}) status={fin.status}")
    print(json.dumps({"synthetic": syn.to_dict(), "finite": fin.to_dict()}, indent=1))


if __name__ == "__main__":
    main()
