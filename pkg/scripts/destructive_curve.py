#!/usr/bin/env python3
"""Destructive-sampling detection probability curves as CSV on stdout.

For each (N, a) scenario, sweeps the number of destroyed chips t and prints
the closed-form hypergeometric detection probability, optionally with a
sampling-without-replacement Monte Carlo estimate beside it.
"""

import argparse

from tpad.attacks import destructive_detection_probability, simulate_destructive_sampling


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scenarios", default="100000:50,10000:5",
                    help="comma list of N:a pairs")
    ap.add_argument("--steps", type=int, default=20)
    ap.add_argument("--mc-trials", type=int, default=0,
                    help="add a Monte Carlo column (0 disables)")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    header = "N,a,t,probability"
    if args.mc_trials:
        header += ",mc_estimate"
    print(header)
    for pair in args.scenarios.split(","):
        n, a = (int(p) for p in pair.split(":"))
        for i in range(args.steps + 1):
            t = round(n * i / args.steps)
            row = f"{n},{a},{t},{destructive_detection_probability(n, a, t):.6f}"
            if args.mc_trials:
                est = simulate_destructive_sampling(n, a, t, args.mc_trials,
                                                    rng_seed=args.seed + i)
                row += f",{est:.6f}"
            print(row)


if __name__ == "__main__":
    main()
