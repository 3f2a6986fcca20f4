#!/usr/bin/env python3
"""Compare F2 from the transfer-operator trace with Monte Carlo D2 for short chains."""
import argparse

from bandxfer.ensemble import EnsembleConfig, covariance_profile, mc_d2
from bandxfer.saddle import saddle_data
from bandxfer.transfer import SectorEngine, f2_via_transfer


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[1, 2, 3, 4])
    ap.add_argument("--W", type=float, default=2.0)
    ap.add_argument("--E", type=float, default=0.5)
    ap.add_argument("--samples", type=int, default=100000)
    ap.add_argument("--h", type=float, default=0.35, help="grid step of the sector engine")
    args = ap.parse_args()

    sd = saddle_data(args.E, args.W)
    eng = SectorEngine(sd, h=args.h, L=6.5)
    print(f"{'n':>3} {'transfer':>12} {'|Im|/|Re|':>10} {'MC':>10} {'se':>8} {'z':>6}")
    for n in args.n:
        r = f2_via_transfer(sd, 0.0, n, covariance_profile(n, args.W), eng)
        mc = mc_d2(EnsembleConfig(n, args.W, args.E, seed=n), args.samples)
        z = (r.value.real - mc.value) / mc.stdError
        print(f"{n:3d} {r.value.real:12.6f} {r.imagRatio:10.1e} {mc.value:10.6f} {mc.stdError:8.5f} {z:6.2f}")


if __name__ == "__main__":
    main()
