"""Rescaled Hermite functions and the Gaussian model operator

    A_*(x, y) = exp(-c x^2/2) B(x, y) exp(-c y^2/2),
    B(x, y) = W (2 pi)^{-1/2} exp(-W^2 (x - y)^2 / 2).

Basis: psi_k(x) = exp(-alpha W x^2) p_k(x), where p_k are the orthonormal
polynomials for the weight exp(-2 alpha_1 W x^2), alpha_1 = Re alpha, with
positive leading coefficient.  Then |psi_k|^2 carries the real weight and the
psi_k are orthonormal in L2(R) for complex alpha as well.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .saddle import alpha_of, lambda0_of


class AccuracyError(RuntimeError):
    """A quadrature or iteration did not reach its target accuracy."""


@lru_cache(maxsize=32)
def _hermgauss(order: int):
    return np.polynomial.hermite.hermgauss(order)


@lru_cache(maxsize=32)
def _hermegauss(order: int):
    z, w = np.polynomial.hermite_e.hermegauss(order)
    return z, w / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class HermiteBasis:
    c: complex
    W: float
    kMax: int = 12
    alpha: complex = field(init=False)

    def __post_init__(self):
        if not complex(self.c).real > 0:
            raise ValueError("Re c must be positive")
        object.__setattr__(self, "alpha", complex(alpha_of(complex(self.c), self.W)))

    @property
    def alpha1(self) -> float:
        return self.alpha.real

    @property
    def alpha2(self) -> float:
        return self.alpha.imag

    @property
    def scale(self) -> float:
        """u = x * scale is the standard Hermite variable."""
        return math.sqrt(2.0 * self.alpha1 * self.W)

    @property
    def log_normalizers(self) -> np.ndarray:
        """log h_k with h_k = k! (4 alpha_1 W)^{k - 1/2} sqrt(2 pi)."""
        k = np.arange(self.kMax + 1)
        from scipy.special import gammaln
        return gammaln(k + 1) + (k - 0.5) * math.log(4 * self.alpha1 * self.W) + 0.5 * math.log(2 * math.pi)

    @property
    def normalizers(self) -> np.ndarray:
        return np.exp(self.log_normalizers)

    def polys(self, x, kmax: int | None = None) -> np.ndarray:
        """p_0..p_kmax at x, shape (kmax+1,) + x.shape, by three-term recurrence."""
        kmax = self.kMax if kmax is None else kmax
        x = np.asarray(x, dtype=float)
        u = x * self.scale
        P = np.empty((kmax + 1,) + x.shape)
        P[0] = math.pi**-0.25
        if kmax >= 1:
            P[1] = math.sqrt(2.0) * u * P[0]
        for k in range(1, kmax):
            P[k + 1] = math.sqrt(2.0 / (k + 1)) * u * P[k] - math.sqrt(k / (k + 1)) * P[k - 1]
        return P * math.sqrt(self.scale)

    def functions(self, x, kmax: int | None = None) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.polys(x, kmax) * np.exp(-self.alpha * self.W * x * x)

    def position_matrix(self, kmax: int | None = None) -> np.ndarray:
        """Galerkin matrix of multiplication by x (real symmetric tridiagonal)."""
        kmax = self.kMax if kmax is None else kmax
        off = np.sqrt(np.arange(1, kmax + 1) / (4.0 * self.alpha1 * self.W))
        return np.diag(off, 1) + np.diag(off, -1)


def psi_k(basis: HermiteBasis, k: int, x):
    if not 0 <= k <= basis.kMax:
        raise IndexError(f"k={k} outside 0..{basis.kMax}")
    out = basis.functions(x, k)[k]
    return out[()] if np.ndim(out) == 0 else out


def model_lambda0(c: complex, W: float) -> complex:
    return complex(lambda0_of(complex(c), W))


@dataclass(frozen=True)
class ModelOperatorMatrix:
    entries: np.ndarray
    c: complex
    W: float


def _model_matrix_at(basis: HermiteBasis, n_outer: int, n_inner: int) -> np.ndarray:
    """(A_* psi_k, psi_j) by Gauss-Hermite in x and in z, with y = x + z/W."""
    W, c, al = basis.W, complex(basis.c), basis.alpha
    u, wu = _hermgauss(n_outer)
    x = u / basis.scale
    z, wz = _hermegauss(n_inner)
    y = x[:, None] + z[None, :] / W
    Py = basis.polys(y)  # (K, nx, nz)
    # inner(x) = sum_z wz exp(-c y^2/2 - alpha W y^2) p_k(y)
    ey = np.exp(-(c / 2.0 + al * W) * y * y + al * W * x[:, None] ** 2)  # rescaled by e^{alpha W x^2}
    inner = np.einsum("kxz,xz,z->kx", Py, ey, wz)
    # outer integrand / e^{-u^2}: p_j(x) e^{-conj(alpha) W x^2} e^{-c x^2/2} inner e^{u^2}
    # with inner carrying e^{-alpha W x^2}: total exponent -(2 alpha_1 W) x^2 + u^2 = 0
    Px = basis.polys(x)
    ex = np.exp(-c * x * x / 2.0)
    return np.einsum("jx,kx->jk", Px * (wu * ex / basis.scale)[None, :], inner)


def model_matrix(basis: HermiteBasis, tol: float = 1e-8, max_order: int = 1024) -> ModelOperatorMatrix:
    """Model operator matrix with Gauss-Hermite order doubling until successive
    orders agree within `tol`."""
    if basis.kMax > 20:
        raise ValueError("kMax must be <= 20")
    order = 32
    prev = _model_matrix_at(basis, order, order)
    while order < max_order:
        order *= 2
        cur = _model_matrix_at(basis, order, order)
        if np.max(np.abs(cur - prev)) <= tol:
            return ModelOperatorMatrix(cur, complex(basis.c), basis.W)
        prev = cur
    raise AccuracyError("model matrix quadrature did not converge")


def apply_model_operator(basis: HermiteBasis, coeff_fn, x, n_inner: int = 128):
    """(A_* g)(x) for a callable g, by Gauss-Hermite in the shifted variable."""
    c, W = complex(basis.c), basis.W
    x = np.asarray(x, dtype=float)
    z, wz = _hermegauss(n_inner)
    y = x[..., None] + z / W
    return np.exp(-c * x * x / 2.0) * np.sum(wz * np.exp(-c * y * y / 2.0) * coeff_fn(y), axis=-1)


def overlap_matrix(basisA: HermiteBasis, basisB: HermiteBasis, l: int | None = None,
                   m: int | None = None, tol: float = 1e-10) -> np.ndarray:
    """|(psi_j, psi~_k)| for j <= m (basisA) and k <= l (basisB)."""
    if basisA.W != basisB.W:
        raise ValueError("bases must share W")
    m = basisA.kMax if m is None else m
    l = basisB.kMax if l is None else l
    W = basisA.W
    s = math.sqrt((basisA.alpha1 + basisB.alpha1) * W)

    def at(order):
        u, wu = _hermgauss(order)
        x = u / s
        PA = basisA.polys(x, m)
        PB = basisB.polys(x, l)
        chirp = np.exp(-1j * (basisA.alpha2 - basisB.alpha2) * W * x * x)
        return np.einsum("jx,x,kx->jk", PA, wu * chirp / s, PB)

    order = 64
    prev = at(order)
    while order < 256:
        order *= 2
        cur = at(order)
        if np.max(np.abs(cur - prev)) <= tol:
            return np.abs(cur)
        prev = cur
    raise AccuracyError("overlap quadrature did not converge")
