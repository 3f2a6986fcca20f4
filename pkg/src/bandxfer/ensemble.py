"""Gaussian Hermitian band matrices with circulant covariance, and Monte Carlo
estimates of the second mixed moment of characteristic polynomials."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .saddle import DomainError, semicircle_density

_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class EnsembleConfig:
    n: int
    W: float
    E: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n}")
        if not self.W > 0:
            raise DomainError(f"W must be positive, got {self.W}")
        if not abs(self.E) < 2:
            raise DomainError(f"|E| must be < 2, got {self.E}")
        if not 0 <= self.seed <= _SEED_MASK:
            raise DomainError("seed must be a 64-bit unsigned integer")

    @property
    def rho(self) -> float:
        return semicircle_density(self.E)


@dataclass(frozen=True)
class CovarianceProfile:
    firstRow: np.ndarray
    logDet: float

    @property
    def n(self) -> int:
        return len(self.firstRow)

    def matrix(self) -> np.ndarray:
        return scipy.linalg.circulant(self.firstRow).T


@dataclass(frozen=True)
class McEstimate:
    value: float
    stdError: float
    samples: int


@dataclass(frozen=True)
class CrossoverRow:
    xi: float
    ratio: float
    std_error: float
    samples: int
    regime: str


CrossoverTable = list  # list[CrossoverRow]


def laplacian_multipliers(n: int, W: float) -> np.ndarray:
    k = np.arange(n)
    return 1.0 + 2.0 * W * W * (1.0 - np.cos(2.0 * np.pi * k / n))


def covariance_profile(n: int, W: float) -> CovarianceProfile:
    """First row of J = (-W^2 Laplacian + 1)^{-1} on the periodic chain."""
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    if not W > 0:
        raise DomainError(f"W must be positive, got {W}")
    mult = laplacian_multipliers(n, W)
    row = np.fft.ifft(1.0 / mult).real
    # symmetrize j -> n-j exactly; the ifft leaves ~1e-17 asymmetry
    row = 0.5 * (row + np.roll(row[::-1], 1))
    return CovarianceProfile(firstRow=row, logDet=float(-np.sum(np.log(mult))))


def sample_stream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for one sample; depends only on (seed, index)."""
    return np.random.Generator(np.random.SFC64(np.random.SeedSequence(seed, spawn_key=(index,))))


class BandSampler:
    """Draws H with E H_ij H_lk = delta_ik delta_jl J_ij.

    Diagonal entries are real N(0, J_ii); off-diagonal ones have independent
    real and imaginary parts of variance J_ij / 2.
    """

    def __init__(self, cfg: EnsembleConfig, cov: CovarianceProfile | None = None):
        self.cfg = cfg
        self.cov = cov if cov is not None else covariance_profile(cfg.n, cfg.W)
        n = cfg.n
        J = self.cov.matrix()
        self._iu = np.triu_indices(n, 1)
        self._sd_off = np.sqrt(J[self._iu] / 2.0)
        self._sd_diag = np.sqrt(np.diag(J))

    def sample(self, index: int, dtype=np.complex128) -> np.ndarray:
        n = self.cfg.n
        rng = sample_stream(self.cfg.seed, index)
        m = len(self._sd_off)
        g = rng.standard_normal(2 * m + n)
        H = np.zeros((n, n), dtype=dtype)
        off = (g[:m] + 1j * g[m : 2 * m]) * self._sd_off
        H[self._iu] = off
        H += H.conj().T
        H[np.diag_indices(n)] = g[2 * m :] * self._sd_diag
        return H

    def eigenvalues(self, index: int, single: bool = False) -> np.ndarray:
        H = self.sample(index, np.complex64 if single else np.complex128)
        ev = scipy.linalg.eigvalsh(H, driver="evd", check_finite=False, overwrite_a=True)
        return ev.astype(np.float64)


def sample_band_matrix(cfg: EnsembleConfig, sampleIndex: int) -> np.ndarray:
    return BandSampler(cfg).sample(sampleIndex)


def char_poly_product(H: np.ndarray, lam1: float, lam2: float, tol: float = 1e-10):
    """log|det(lam1 - H) det(lam2 - H)| and its sign, from the spectrum of H.

    An exact zero returns (-inf, 0).
    """
    H = np.asarray(H)
    if np.max(np.abs(H - H.conj().T), initial=0.0) > tol:
        raise ValueError("H is not Hermitian")
    ev = np.linalg.eigvalsh(H)
    return _log_product(ev, np.array([lam1, lam2]))


def _log_product(ev: np.ndarray, lams: np.ndarray):
    diff = lams[:, None] - ev[None, :]
    if np.any(diff == 0):
        return -math.inf, 0
    logabs = float(np.sum(np.log(np.abs(diff))))
    sign = 1 if np.count_nonzero(diff < 0) % 2 == 0 else -1
    return logabs, sign


def _log_products(ev: np.ndarray, lam1: np.ndarray, lam2: np.ndarray):
    """Vectorized over pairs (lam1[i], lam2[i])."""
    d1 = lam1[:, None] - ev[None, :]
    d2 = lam2[:, None] - ev[None, :]
    with np.errstate(divide="ignore"):
        la = np.sum(np.log(np.abs(d1)), axis=1) + np.sum(np.log(np.abs(d2)), axis=1)
    neg = np.count_nonzero(d1 < 0, axis=1) + np.count_nonzero(d2 < 0, axis=1)
    sign = np.where(neg % 2 == 0, 1.0, -1.0)
    zero = np.any(d1 == 0, axis=1) | np.any(d2 == 0, axis=1)
    sign[zero] = 0.0
    la[zero] = -np.inf
    return la, sign


def regime_tag(n: int, W: float, C: float = 1.0) -> str:
    """Heuristic: localized if W^2 < n/(C log n), delocalized if W^2 > n."""
    w2 = W * W
    if n > 1 and w2 < n / (C * math.log(n)):
        return "localized"
    if w2 > n:
        return "delocalized"
    return "critical"


def ratio_estimate(num: np.ndarray, den: np.ndarray):
    """Ratio of means with a delta-method standard error."""
    N = len(den)
    mx, my = den.mean(), num.mean()
    r = my / mx
    resid = num - r * den
    var = np.sum(resid * resid) / (N - 1) / N
    return float(r), float(math.sqrt(max(var, 0.0)) / abs(mx))


def mc_log_products(cfg: EnsembleConfig, xis: Sequence[float], samples: int,
                    single: bool = False, start: int = 0):
    """Per-sample log|det(l1-H)det(l2-H)| and signs with l = E +- xi/(n rho).

    Returns arrays of shape (samples, len(xis)).
    """
    sampler = BandSampler(cfg)
    xis = np.asarray(xis, dtype=float)
    scale = cfg.n * cfg.rho
    lam1 = cfg.E + xis / scale
    lam2 = cfg.E - xis / scale
    logs = np.empty((samples, len(xis)))
    signs = np.empty((samples, len(xis)))
    for s in range(samples):
        ev = sampler.eigenvalues(start + s, single=single)
        logs[s], signs[s] = _log_products(ev, lam1, lam2)
    return logs, signs


def mc_f2_ratio(cfg: EnsembleConfig, xis: Sequence[float], samples: int,
                single: bool = False, C: float = 1.0) -> list[CrossoverRow]:
    """D2^{-1} F2(E + xi/n rho, E - xi/n rho) with common random numbers.

    Numerator and denominator use the same matrices; all products are scaled
    by the largest xi = 0 log-product before exponentiating.
    """
    if samples < 100:
        raise DomainError("samples must be >= 100")
    xis = [float(x) for x in xis]
    if not all(math.isfinite(x) for x in xis):
        raise DomainError("xi values must be finite")
    grid = sorted(set(xis) | {0.0})
    logs, signs = mc_log_products(cfg, grid, samples, single=single)
    i0 = grid.index(0.0)
    ref = np.max(logs[:, i0])
    den = signs[:, i0] * np.exp(logs[:, i0] - ref)
    tag = regime_tag(cfg.n, cfg.W, C)
    rows = []
    for xi in xis:
        k = grid.index(xi)
        with np.errstate(over="ignore", invalid="ignore"):
            num = signs[:, k] * np.exp(logs[:, k] - ref)
        if xi == 0.0:
            rows.append(CrossoverRow(xi, 1.0, 0.0, samples, tag))
            continue
        if not np.all(np.isfinite(num)):
            rows.append(CrossoverRow(xi, math.nan, math.nan, samples, "overflow"))
            continue
        r, se = ratio_estimate(num, den)
        rows.append(CrossoverRow(xi, r, se, samples, tag))
    return rows


def mc_d2(cfg: EnsembleConfig, samples: int, chunk: int = 20000) -> McEstimate:
    """Plain Monte Carlo estimate of D2 = E det(E - H)^2 (small n only)."""
    sampler = BandSampler(cfg)
    n = cfg.n
    vals = np.empty(samples)
    for lo in range(0, samples, chunk):
        hi = min(samples, lo + chunk)
        Hs = np.stack([sampler.sample(i) for i in range(lo, hi)])
        ev = np.linalg.eigvalsh(Hs)
        vals[lo:hi] = np.prod(cfg.E - ev, axis=1) ** 2
    return McEstimate(float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(samples)), samples)


def semicircle_cdf(x):
    x = np.clip(np.asarray(x, dtype=float), -2.0, 2.0)
    return 0.5 + (x * np.sqrt(4.0 - x * x) / 4.0 + np.arcsin(x / 2.0)) / np.pi


@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray
    density: np.ndarray
    eigenvalues: np.ndarray

    def kolmogorov_distance(self) -> float:
        ev = np.sort(self.eigenvalues)
        N = len(ev)
        F = semicircle_cdf(ev)
        hi = np.arange(1, N + 1) / N
        lo = np.arange(0, N) / N
        return float(max(np.max(hi - F), np.max(F - lo)))


def empirical_density(cfg: EnsembleConfig, samples: int, bins: int = 100) -> Histogram:
    if samples < 10:
        raise DomainError("samples must be >= 10")
    sampler = BandSampler(cfg)
    ev = np.concatenate([sampler.eigenvalues(i) for i in range(samples)])
    dens, edges = np.histogram(ev, bins=bins, range=(-2.5, 2.5), density=True)
    return Histogram(edges, dens, ev)
