#!/usr/bin/env python3
"""FFT checker coverage experiment: calibrate, then measure detection rates.

Prints the calibrated threshold, the false-positive count on clean runs,
and detection rates for persistent butterfly faults and output permutations.
"""

import argparse

import numpy as np

from tpad.fftced import (
    calibrate_threshold,
    fft,
    fft_attack_campaign,
    plancherel_residual,
    white_noise_input,
)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=128)
    ap.add_argument("--calibration-trials", type=int, default=1000)
    ap.add_argument("--margin", type=float, default=2.0)
    ap.add_argument("--clean-runs", type=int, default=10_000)
    ap.add_argument("--attack-trials", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    threshold, ref = calibrate_threshold(
        args.n, args.calibration_trials, args.margin, rng_seed=args.seed
    )
    print(f"threshold,{threshold:.6g}")

    npr = np.random.default_rng(args.seed + 1)
    fps = 0
    for _ in range(args.clean_runs):
        x = white_noise_input(args.n, npr)
        fps += plancherel_residual(x, fft(x), ref) > threshold
    print(f"clean_runs,{args.clean_runs},false_positives,{fps}")

    flips = fft_attack_campaign(args.n, args.attack_trials, threshold, ref,
                                rng_seed=args.seed + 2)
    print(f"butterfly_flips,{flips.trials},detected,{flips.detected},"
          f"rate,{flips.detection_rate:.4f}")
    perms = fft_attack_campaign(args.n, args.attack_trials, threshold, ref,
                                rng_seed=args.seed + 3, attack="permutation",
                                probes_per_trial=1)
    print(f"permutations,{perms.trials},detected,{perms.detected},"
          f"rate,{perms.detection_rate:.4f}")


if __name__ == "__main__":
    main()
