"""Galerkin matrix of the scalar operator A(x, y) = F(x) B(x, y) F(y) in a
Hermite basis centered at one of the saddle points."""
from __future__ import annotations

import math

import numpy as np

from ..hermite import AccuracyError, HermiteBasis
from ..saddle import SaddleData, weight_F


def _check_center(center: str) -> str:
    if center not in ("+", "-"):
        raise ValueError(f"center must be '+' or '-', got {center!r}")
    return center


def gaussian_kernel(x, y, W: float) -> np.ndarray:
    """B(x, y) = W (2 pi)^{-1/2} exp(-W^2 (x - y)^2 / 2)."""
    d = np.subtract.outer(np.asarray(x, float), np.asarray(y, float))
    return W / math.sqrt(2.0 * math.pi) * np.exp(-0.5 * (W * d) ** 2)


def basis_for(sd: SaddleData, center: str, order: int) -> HermiteBasis:
    """Hermite basis psi_0..psi_{order-1} for c = c_+ or c_-."""
    return HermiteBasis(sd.c(_check_center(center)), sd.W, kMax=order - 1)


def _nodes(sd: SaddleData, center: str, h: float, L: float):
    """Quadrature nodes (offsets from the center) and weights.

    For E != 0 a uniform grid.  At E = 0, F has a square-root branch point at
    the origin; the operator is then taken on the half-line on the side of
    the center, parametrized as a = +-t^2 so the integrand is smooth and even
    in t.
    """
    a0 = sd.center(center)
    if sd.E != 0.0:
        x = h * np.arange(-int(L / h), int(L / h) + 1)
        return x, np.full(x.shape, h)
    sign = 1.0 if a0 > 0 else -1.0
    tmax = math.sqrt(abs(a0) + L)
    dt = h / (2.0 * tmax)
    t = dt * np.arange(1, int(tmax / dt) + 1)
    return sign * t * t - a0, 2.0 * t * dt


def _galerkin_at(sd: SaddleData, basis: HermiteBasis, center: str, h: float, L: float) -> np.ndarray:
    x, w = _nodes(sd, center, h, L)
    Psi = basis.functions(x)  # (K, N)
    Fx = weight_F(sd.center(center) + x, sd) * w
    kern = Fx[:, None] * gaussian_kernel(x, x, sd.W) * Fx[None, :]
    return Psi.conj() @ kern @ Psi.T


def galerkin_A(sd: SaddleData, center: str, order: int, tol: float = 1e-9) -> np.ndarray:
    """(A psi_k, psi_j) for j, k < order, basis centered at a_+ or a_-.

    Uniform trapezoid rule in both variables (spectrally accurate for the
    Gaussian convolution).  The nominal grid is checked against a 3/4-step
    grid; disagreement above `tol` raises AccuracyError.
    """
    if not 1 <= order <= 40:
        raise ValueError("order must be in 1..40")
    basis = basis_for(sd, center, order)
    L = (math.sqrt(2.0 * order + 1.0) + 8.0) / basis.scale
    h = min(0.4 / sd.W, 0.6 / (basis.scale * math.sqrt(2.0 * order + 1.0)))
    M = _galerkin_at(sd, basis, center, h, L)
    M2 = _galerkin_at(sd, basis, center, 0.75 * h, L)
    err = np.max(np.abs(M - M2))
    if err > tol:
        raise AccuracyError(f"galerkin_A quadrature mismatch {err:.2e}")
    return M2
