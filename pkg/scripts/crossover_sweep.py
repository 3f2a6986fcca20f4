#!/usr/bin/env python3
"""Sweep W at fixed n and print the F2 ratio table against the sine kernel.

    python scripts/crossover_sweep.py --n 64 --W 2 4 8 16 --samples 20000
"""
import argparse
import math

from bandxfer.ensemble import EnsembleConfig, mc_f2_ratio


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=64)
    ap.add_argument("--W", type=float, nargs="+", default=[2.0, 4.0, 8.0, 16.0])
    ap.add_argument("--xi", type=float, nargs="+", default=[0.25, 0.5, 1.0, 2.0])
    ap.add_argument("--samples", type=int, default=20000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--single", action="store_true", help="float32 eigenvalues")
    args = ap.parse_args()

    print(f"{'W':>6} {'xi':>6} {'ratio':>10} {'se':>8} {'sine':>8}  regime")
    for W in args.W:
        rows = mc_f2_ratio(EnsembleConfig(args.n, W, 0.0, args.seed), args.xi, args.samples, single=args.single)
        for r in rows:
            x = 2 * math.pi * r.xi
            print(f"{W:6.1f} {r.xi:6.2f} {r.ratio:10.4f} {r.std_error:8.4f} {math.sin(x) / x:8.4f}  {r.regime}")


if __name__ == "__main__":
    main()
