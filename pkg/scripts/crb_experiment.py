#!/usr/bin/env python3
"""Cramer-Rao saturation experiment: sweep kept-shot budgets and print
how the estimator variance tracks the 1/(N*F) floor.

Usage: python scripts/crb_experiment.py [--seed N] [--trials N]
"""

import argparse
import math
import sys

from spinmetro import entangle, estimator, spin


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=8)
    parser.add_argument("--trials", type=int, default=200)
    parser.add_argument("--beta", type=float, default=0.4)
    parser.add_argument("--theta", type=float, default=0.7)
    args = parser.parse_args()

    sys_ = spin.make_spin_system(1)
    axis = spin.AxisSpec(args.theta)
    psi = entangle.maximally_entangled(3)

    print(f"{'shots':>8} {'var':>12} {'1/(N*F)':>12} {'N*F*var':>9} {'kept':>7} {'bias':>10}")
    for shots in (1000, 2000, 5000, 10_000, 20_000):
        cfg = estimator.EstimationConfig(beta_true=args.beta, shots=shots,
                                         trials=args.trials, seed=args.seed)
        res = estimator.run_estimation(cfg, psi, sys_, axis)
        bias = res.mean_beta - args.beta
        print(f"{shots:>8d} {res.empirical_variance:>12.3e} {res.crb:>12.3e} "
              f"{res.normalized_variance:>9.4f} {res.kept_fraction:>7.4f} {bias:>10.2e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
