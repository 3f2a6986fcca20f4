"""Reconstruction of F_2 from the transfer operator.

F_2 = (-1)^n C_n(xi) W^{-4n} det^{-2} J Tr K^n(xi), with C_n(xi) as in
`saddle.cn_factor`.  The sign (-1)^n is fixed against Monte Carlo for
n = 1..4 (a constant -1 fails at even n).  That prefactor belongs to the kernel whose multiplier
carries exp(-F*) per side; the engines here use the multiplier normalized to
|F| = 1 at the saddle points, which multiplies K by e^{4F*}.  The difference is
the -4nF* term below.  Everything is combined in the log domain.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..ensemble import CovarianceProfile
from ..saddle import SaddleData, log_cn_factor
from .polar import PolarBlockEngine, xi_operator
from .sector import SectorEngine

IMAG_TOL = 1e-3


@dataclass(frozen=True)
class TransferF2:
    logValue: complex
    traceLog: complex
    jUsed: int
    imagRatio: float
    phaseFlag: bool

    @property
    def value(self) -> complex:
        if self.logValue.real > 700:
            return complex(math.inf, 0.0)
        return complex(np.exp(self.logValue))


def log_power_sum(vals: np.ndarray, mult: np.ndarray, n: int) -> complex:
    """log sum_i mult_i vals_i^n without overflow."""
    vals = np.asarray(vals, dtype=complex)
    i = np.argmax(np.abs(vals))
    top = vals[i]
    rel = np.sum(mult * (vals / top) ** n)
    return complex(n * np.log(top) + np.log(rel))


def polar_trace_log(engine: PolarBlockEngine, xi: float, n: int) -> complex:
    """log Tr K^n(xi) from all eigenvalues of the k-sectors |k| <= jMax."""
    vals, mult = [], []
    for k in range(engine.jMax + 1):
        ev = np.linalg.eigvals(xi_operator(engine, xi, n, k))
        vals.append(ev)
        mult.append(np.full(ev.shape, 1.0 if k == 0 else 2.0))
    return log_power_sum(np.concatenate(vals), np.concatenate(mult), n)


def f2_via_transfer(sd: SaddleData, xi: float, n: int, cov: CovarianceProfile, engine) -> TransferF2:
    """F_2 at Lambda_0 + xi_hat/(n rho) from the trace of K^n(xi).

    `engine` is a SectorEngine (full trace, xi = 0 only) or a PolarBlockEngine
    (all retained eigenvalues of the coupled k-sectors).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if cov.n != n:
        raise ValueError("covariance profile size differs from n")
    if isinstance(engine, SectorEngine):
        if xi != 0.0:
            raise ValueError("the sector engine reconstructs xi = 0 only")
        tr, jUsed = engine.total_trace(n)
        trace_log = complex(np.log(tr))
    elif isinstance(engine, PolarBlockEngine):
        trace_log, jUsed = polar_trace_log(engine, xi, n), engine.jMax
    else:
        raise TypeError(f"unsupported engine {type(engine).__name__}")
    log_val = (1j * math.pi * (n % 2) + log_cn_factor(xi, sd, n) - 4.0 * n * sd.Fstar
               - 4.0 * n * math.log(sd.W) - 2.0 * cov.logDet + trace_log)
    phase = log_val.imag
    ratio = abs(math.sin(phase)) / max(abs(math.cos(phase)), 1e-300)
    return TransferF2(complex(log_val), trace_log, jUsed, ratio, ratio > IMAG_TOL)


def f2_ratio(sd: SaddleData, xi: float, n: int, cov: CovarianceProfile, engine) -> complex:
    """F_2(xi) / F_2(0) through the log domain."""
    a = f2_via_transfer(sd, xi, n, cov, engine)
    b = f2_via_transfer(sd, 0.0, n, cov, engine)
    return complex(np.exp(a.logValue - b.logValue))
