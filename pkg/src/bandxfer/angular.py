"""Angular operator on U(2)/U(1)^2: Legendre machinery, exact eigenvalues,
and the quadrature oracle.

Points are parametrized by u = |sin phi| in [0, 1] and theta in [0, 2 pi),
with normalized measure dU = u du dtheta / pi.  The Legendre variable is
x = cos 2 phi = 1 - 2 u^2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np
import scipy.special

from .saddle import DomainError, SaddleData


@dataclass(frozen=True)
class AngularPoint:
    u: float
    theta: float

    def matrix(self) -> np.ndarray:
        s = self.u
        c = math.sqrt(max(1.0 - s * s, 0.0))
        e = complex(math.cos(self.theta), math.sin(self.theta))
        return np.array([[c, s * e], [-s * e.conjugate(), c]])


@dataclass(frozen=True)
class AngularMode:
    j: int
    k: int

    @property
    def normalizer(self) -> float:
        return mode_normalizer(self.j, self.k)

    def __call__(self, u, theta):
        return spherical_mode(self.j, self.k, u, theta)


def mode_normalizer(j: int, k: int) -> float:
    k = abs(k)
    return math.sqrt((2 * j + 1) * math.factorial(j - k) / math.factorial(j + k))


def _check_x(x):
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0 + 1e-14):
        raise DomainError("Legendre argument must satisfy |x| <= 1")
    return x


def legendre_all(jmax: int, x) -> np.ndarray:
    """P_0..P_jmax at x by the Bonnet recurrence; shape (jmax+1,) + x.shape."""
    x = np.asarray(x, dtype=float)
    P = np.empty((jmax + 1,) + x.shape)
    P[0] = 1.0
    if jmax >= 1:
        P[1] = x
    for j in range(1, jmax):
        P[j + 1] = ((2 * j + 1) * x * P[j] - j * P[j - 1]) / (j + 1)
    return P


def legendre(j: int, x):
    x = _check_x(x)
    out = legendre_all(j, x)[j]
    return out[()] if out.ndim == 0 else out


def legendre_derivs(jmax: int, k: int, x) -> np.ndarray:
    """k-th derivatives of P_0..P_jmax, by differentiating Bonnet k times."""
    x = np.asarray(x, dtype=float)
    D = legendre_all(jmax, x)
    for m in range(1, k + 1):
        prev = D
        D = np.zeros_like(prev)
        for j in range(0, jmax):
            D[j + 1] = ((2 * j + 1) * (x * D[j] + m * prev[j]) - j * D[j - 1] if j >= 1 else
                        (2 * j + 1) * (x * D[j] + m * prev[j])) / (j + 1)
    return D


def assoc_legendre(j: int, k: int, x):
    """P_j^k(x) = (1 - x^2)^{k/2} d^k/dx^k P_j(x), no Condon-Shortley phase."""
    if not 0 <= k <= j:
        raise DomainError("need 0 <= k <= j")
    x = _check_x(x)
    out = (1.0 - x * x) ** (k / 2.0) * legendre_derivs(j, k, x)[j]
    return out[()] if out.ndim == 0 else out


def assoc_legendre_all(jmax: int, k: int, x) -> np.ndarray:
    """P_j^k for j = 0..jmax (rows with j < k are zero)."""
    x = np.asarray(x, dtype=float)
    return (1.0 - x * x) ** (k / 2.0) * legendre_derivs(jmax, k, x)


def spherical_mode(j: int, k: int, u, theta):
    """phi_{j,k}(U) = l_{j,k} P_j^{|k|}(1 - 2u^2) e^{i k theta}."""
    u = np.asarray(u, dtype=float)
    x = 1.0 - 2.0 * u * u
    return mode_normalizer(j, k) * assoc_legendre(j, abs(k), x) * np.exp(1j * k * np.asarray(theta))


# ----------------------------------------------------------------- eigenvalues

def shifted_legendre_coeffs(j: int) -> list[int]:
    """Integer coefficients of P_j(1 - 2s) = sum_m c_m s^m."""
    return [(-1) ** m * math.comb(j, m) * math.comb(j + m, m) for m in range(j + 1)]


def angular_eigenvalue(j: int, T: float, dps: int | None = None) -> float:
    """lambda_j(T) = int_0^T e^{-u} P_j(1 - 2u/T) du, T = W^2 t.

    Exact antiderivative: each monomial integrates to a lower incomplete
    gamma function, built by gamma(m+1, T) = m gamma(m, T) - T^m e^{-T}.
    Evaluated in extended precision since the alternating sum cancels.
    """
    if not T > 0:
        raise DomainError("T must be positive")
    if dps is None:
        dps = 30 + 2 * j + int(j * math.log10(max(T, 1.0) + 1.0))
    with mpmath.workdps(dps):
        Tm = mpmath.mpf(T)
        eT = mpmath.exp(-Tm)
        g = 1 - eT  # gamma(1, T)
        total = mpmath.mpf(0)
        power = mpmath.mpf(1)  # T^m
        for m, c in enumerate(shifted_legendre_coeffs(j)):
            if m > 0:
                power *= Tm
                g = m * g - power * eT
            total += c * g / power
        return float(total)


def angular_eigenvalue_taylor(j: int, T0: float, order: int, dps: int = 50) -> np.ndarray:
    """Taylor coefficients d^r lambda_j / dT^r (T0) / r!, r = 0..order."""
    with mpmath.workdps(dps):
        def lam(T):
            eT = mpmath.exp(-T)
            g = 1 - eT
            total = mpmath.mpf(0)
            power = mpmath.mpf(1)
            for m, c in enumerate(shifted_legendre_coeffs(j)):
                if m > 0:
                    power *= T
                    g = m * g - power * eT
                total += c * g / power
            return total
        coeffs = mpmath.taylor(lam, mpmath.mpf(T0), order)
        return np.array([float(c) for c in coeffs])


def angular_eigenvalues(j: int, T) -> np.ndarray:
    """Vectorized lambda_j(T) for T >= 0 via the closed form
    lambda_j(T) = sqrt(pi T) e^{-T/2} I_{j+1/2}(T/2).

    Same integral as `angular_eigenvalue`, rewritten through
    int_{-1}^{1} e^{zx} P_j(x) dx = 2 i_j(z); used for kernel assembly.
    """
    T = np.asarray(T, dtype=float)
    Tp = np.clip(T, 0.0, None)
    out = np.sqrt(np.pi * Tp) * scipy.special.ive(j + 0.5, Tp / 2.0)
    out = np.where(T > 0, out, 0.0)
    return out[()] if out.ndim == 0 else out


def asymptotic_eigenvalue(j: int, T: float) -> float:
    return (1.0 - math.exp(-T)) * (1.0 - j * (j + 1) / T)


# ------------------------------------------------------------------ oracles

@lru_cache(maxsize=16)
def _gauss_legendre(order: int):
    return np.polynomial.legendre.leggauss(order)


def kernel_overlap_sq(U1: np.ndarray, U2: np.ndarray) -> np.ndarray:
    """|(U1 U2^*)_{12}|^2 for stacks of explicit 2x2 matrices."""
    prod = np.einsum("...ik,...jk->...ij", U1, U2.conj())
    return np.abs(prod[..., 0, 1]) ** 2


def param_matrices(u, theta) -> np.ndarray:
    """Explicit 2x2 unitaries for arrays of (u, theta)."""
    u = np.asarray(u, dtype=float)
    theta = np.asarray(theta, dtype=float)
    u, theta = np.broadcast_arrays(u, theta)
    c = np.sqrt(np.clip(1.0 - u * u, 0.0, None))
    e = np.exp(1j * theta)
    M = np.empty(u.shape + (2, 2), dtype=complex)
    M[..., 0, 0] = c
    M[..., 0, 1] = u * e
    M[..., 1, 0] = -u * np.conj(e)
    M[..., 1, 1] = c
    return M


def kstar_apply(j: int, T: float, u1, theta1, quad_order: int = 128, n_theta: int | None = None):
    """(K_* phi_{j,0})(U1) by Gauss-Legendre in x2 = 1 - 2u2^2 times trapezoid in theta2.

    The kernel T exp(-T |(U1 U2^*)_{12}|^2) is evaluated from explicit matrix
    products, independent of any Legendre identity.
    """
    if quad_order < 32:
        raise DomainError("quad_order must be >= 32")
    if n_theta is None:
        n_theta = max(64, int(2 * T) + 32)
    xg, wg = _gauss_legendre(quad_order)
    th = 2.0 * np.pi * np.arange(n_theta) / n_theta
    u2 = np.sqrt((1.0 - xg) / 2.0)
    U2 = param_matrices(u2[:, None], th[None, :])  # (q, m, 2, 2)
    phi2 = math.sqrt(2 * j + 1) * legendre_all(j, xg)[j]
    u1 = np.atleast_1d(np.asarray(u1, dtype=float))
    theta1 = np.atleast_1d(np.asarray(theta1, dtype=float))
    U1 = param_matrices(u1, theta1)
    out = np.empty(len(u1))
    for i in range(len(u1)):
        q = kernel_overlap_sq(U1[i][None, None], U2)
        kern = T * np.exp(-T * q)
        # dU = dx dtheta / (4 pi)
        out[i] = np.sum(wg[:, None] * kern * phi2[:, None]) / (2.0 * n_theta)
    return out


def kstar_apply_check(j: int, T: float, quad_order: int = 128, n_test: int = 9) -> float:
    """Max |K_* phi_{j,0} - lambda_j(T) phi_{j,0}| on a test grid of U."""
    u1 = np.linspace(0.0, 1.0, n_test)
    theta1 = np.linspace(0.0, 2.0 * np.pi, n_test, endpoint=False) + 0.3
    lhs = kstar_apply(j, T, u1, theta1, quad_order)
    rhs = angular_eigenvalue(j, T) * math.sqrt(2 * j + 1) * legendre(j, 1.0 - 2.0 * u1**2)
    return float(np.max(np.abs(lhs - rhs)))


def angular_eigenvalue_quadrature(j: int, T: float, quad_order: int = 128) -> float:
    """Oracle: 2T int_0^1 e^{-T u^2} P_j(1 - 2u^2) u du by Gauss-Legendre on x."""
    xg, wg = _gauss_legendre(quad_order)
    # 2u du = -dx/2 with x = 1 - 2u^2, u^2 = (1 - x)/2
    return float(T * 0.5 * np.sum(wg * np.exp(-T * (1.0 - xg) / 2.0) * legendre_all(j, xg)[j]))


def addition_theorem(j: int, u1, th1, u2, th2):
    """P_j of the angle between two points via the Legendre addition theorem.

    sin 2phi = 2u sqrt(1 - u^2) is taken from u directly; recovering it from
    x = 1 - 2u^2 loses all digits for small u.
    """
    u1, u2 = np.asarray(u1, dtype=float), np.asarray(u2, dtype=float)
    x1, x2 = 1.0 - 2.0 * u1**2, 1.0 - 2.0 * u2**2
    s1 = 2.0 * u1 * np.sqrt(np.clip(1.0 - u1**2, 0.0, None))
    s2 = 2.0 * u2 * np.sqrt(np.clip(1.0 - u2**2, 0.0, None))
    total = legendre(j, x1) * legendre(j, x2)
    dth = np.asarray(th1) - np.asarray(th2)
    for l in range(1, j + 1):
        ratio = math.factorial(j - l) / math.factorial(j + l)
        p1 = s1**l * legendre_derivs(j, l, x1)[j]
        p2 = s2**l * legendre_derivs(j, l, x2)[j]
        total = total + 2.0 * ratio * p1 * p2 * np.cos(l * dth)
    return total


def nu_weight(a: float, b: float, u: float, xi: float, sd: SaddleData) -> complex:
    """nu(a, b, U) = -i xi (a - b) Tr(U L U^* L) / (4 rho), Tr U L U^* L = 2(1 - 2u^2)."""
    if not 0.0 <= u <= 1.0:
        raise DomainError("u must lie in [0, 1]")
    return complex(-1j * xi * (a - b) * (1.0 - 2.0 * u * u) / (2.0 * sd.rho))


def cos_mode_matrix(k: int, jmax: int, s: float, order: int | None = None) -> np.ndarray:
    """N_{j,j'}(s) = int conj(phi_{j,k}) e^{-i s x} phi_{j',k} dU for |k| <= j, j' <= jmax.

    x = 1 - 2u^2.  Multiplication by e^{-i s x} is unitary on L2(dU), so the
    truncated matrix is a compression of a unitary.  Rows and columns are
    indexed by j - |k|.
    """
    k = abs(k)
    if k > jmax:
        raise DomainError("need |k| <= jmax")
    return cos_mode_matrices(k, jmax, np.array([s]), order)[0]


def cos_mode_matrices(k: int, jmax: int, s, order: int | None = None) -> np.ndarray:
    """Stack of `cos_mode_matrix` over an array of s values."""
    k = abs(k)
    s = np.asarray(s, dtype=float)
    if order is None:
        order = 2 * jmax + 24 + int(np.ceil(np.max(np.abs(s), initial=0.0)))
    xg, wg = _gauss_legendre(order)
    P = assoc_legendre_all(jmax, k, xg)[k:]  # (J, q)
    norms = np.array([mode_normalizer(j, k) for j in range(k, jmax + 1)])
    Pn = P * norms[:, None]
    phase = np.exp(-1j * s[:, None] * xg[None, :])  # (S, q)
    # 2u du dtheta / (2 pi) -> dx / 2
    return 0.5 * np.einsum("jq,sq,lq->sjl", Pn, phase * wg[None, :], Pn)
