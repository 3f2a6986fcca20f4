#!/usr/bin/env python3
"""Spectral scaling of the scalar operator A and the full transfer operator K.

Prints |lambda(A) - lambda_0,+| and the gap of A over W, then the gap
epsilon = (1 - |lambda_1/lambda_0|) W^2 of K from the polar engine.
"""
import argparse

import numpy as np

from bandxfer.hermite import model_lambda0
from bandxfer.saddle import saddle_data
from bandxfer.transfer import PolarBlockEngine, galerkin_A, spectrum


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--E", type=float, default=0.5)
    ap.add_argument("--WA", type=float, nargs="+", default=[6.0, 10.0, 14.0])
    ap.add_argument("--EK", type=float, default=0.0, help="energy for the K part")
    ap.add_argument("--WK", type=float, nargs="+", default=[4.0, 6.0, 8.0])
    ap.add_argument("--order", type=int, default=8, help="Hermite order for A")
    ap.add_argument("--perAxisOrder", type=int, default=24)
    args = ap.parse_args()

    dist = []
    print("scalar A:   W   |lam - lam0+|    gap*W")
    for W in args.WA:
        sd = saddle_data(args.E, W)
        ev = np.linalg.eigvals(galerkin_A(sd, "+", args.order))
        ev = ev[np.argsort(-np.abs(ev))]
        dist.append(abs(ev[0] - model_lambda0(sd.c("+"), W)))
        print(f"        {W:5.1f}   {dist[-1]:.4e}    {(1 - abs(ev[1] / ev[0])) * W:.4f}")
    gamma = -np.polyfit(np.log(args.WA), np.log(dist), 1)[0]
    print(f"fitted exponent gamma = {gamma:.3f}")

    print("\ntransfer K: W   lambda0                 eps = gap*W^2  sector(lambda1)")
    for W in args.WK:
        rep = spectrum(PolarBlockEngine(saddle_data(args.EK, W), args.perAxisOrder, 2), 2)
        l0 = rep.eigenvalues[0]
        print(f"        {W:5.1f}   {l0.real:+.6f}{l0.imag:+.6f}j   {rep.gap * W * W:.4f}         {rep.sectors[1]}")


if __name__ == "__main__":
    main()
