"""Closed-form saddle-point constants and the scalar phase function.

Everything here is a cheap closed form evaluated on the principal branch.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


@dataclass(frozen=True)
class SaddleData:
    E: float
    W: float
    rho: float
    aPlus: float
    cPlus: complex
    cMinus: complex
    alphaPlus: complex
    alphaMinus: complex
    Fstar: complex
    lambda0Plus: complex
    lambda0Minus: complex

    @property
    def aMinus(self) -> float:
        return -self.aPlus

    @property
    def t0(self) -> float:
        """Squared saddle separation (a+ - a-)**2."""
        return 4.0 * self.aPlus**2

    @property
    def omega(self) -> complex:
        """Unit-modulus value of F(a-)**2 = exp(-f(a-)).

        The scalar operator A picks up this phase near a-, so the top
        eigenvalue of the transfer operator sits near omega*l0+*l0-.
        """
        return complex(np.exp(-f_scalar(self.aMinus, self)))

    def c(self, center: str) -> complex:
        return self.cPlus if center == "+" else self.cMinus

    def alpha(self, center: str) -> complex:
        return self.alphaPlus if center == "+" else self.alphaMinus

    def center(self, center: str) -> float:
        return self.aPlus if center == "+" else self.aMinus


def semicircle_density(E: float) -> float:
    return float(np.sqrt(max(4.0 - E * E, 0.0)) / (2.0 * np.pi))


def alpha_of(c: complex, W: float) -> complex:
    return np.sqrt(c / 2.0) * np.sqrt(1.0 + c / (2.0 * W * W))


def lambda0_of(c: complex, W: float) -> complex:
    a = alpha_of(c, W)
    return 1.0 / np.sqrt(1.0 + 2.0 * a / W + c / (W * W))


def saddle_data(E: float, W: float) -> SaddleData:
    if not abs(E) < 2.0:
        raise DomainError(f"|E| must be < 2, got {E}")
    if not W > 0:
        raise DomainError(f"W must be positive, got {W}")
    E = float(E)
    W = float(W)
    a = float(np.sqrt(1.0 - E * E / 4.0))
    root = np.sqrt(4.0 - E * E)
    cp = complex(a * (root + 1j * E) / 2.0)
    cm = complex(a * (root - 1j * E) / 2.0)
    z = complex(a, E / 2.0)
    # 1/4 Tr(a+ I + i E/2)^2 - 1/2 Tr log(a+ I - i E/2) for 2x2 scalars
    fstar = z * z / 2.0 - np.log(np.conj(z))
    return SaddleData(
        E=E,
        W=W,
        rho=semicircle_density(E),
        aPlus=a,
        cPlus=cp,
        cMinus=cm,
        alphaPlus=complex(alpha_of(cp, W)),
        alphaMinus=complex(alpha_of(cm, W)),
        Fstar=complex(fstar),
        lambda0Plus=complex(lambda0_of(cp, W)),
        lambda0Minus=complex(lambda0_of(cm, W)),
    )


def f_scalar(x, sd: SaddleData):
    """f(x) = (x + iE/2)^2/2 - log(x - iE/2) - F*, principal log.

    Returns complex infinity where the log argument vanishes (E = 0, x = 0).
    """
    x = np.asarray(x, dtype=float)
    w = x - 0.5j * sd.E
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (x + 0.5j * sd.E) ** 2 / 2.0 - np.log(w) - sd.Fstar
    out = np.where(w == 0, complex(np.inf, 0.0), out)
    return out[()] if out.ndim == 0 else out


def weight_F(x, sd: SaddleData):
    """F(x) = exp(-f(x)/2); zero at the E = 0 singularity."""
    x = np.asarray(x, dtype=float)
    w = x - 0.5j * sd.E
    with np.errstate(divide="ignore", invalid="ignore"):
        f = (x + 0.5j * sd.E) ** 2 / 2.0 - np.log(w) - sd.Fstar
        out = np.exp(-f / 2.0)
    out = np.where(w == 0, 0.0 + 0.0j, out)
    return out[()] if out.ndim == 0 else out


def weight_F2(x, sd: SaddleData):
    """F(x)**2 written without logs: (x - iE/2) exp(-(x + iE/2)^2/2 + F*).

    Entire in x, so safe for quadrature across x = 0.
    """
    x = np.asarray(x, dtype=float)
    out = (x - 0.5j * sd.E) * np.exp(-((x + 0.5j * sd.E) ** 2) / 2.0 + sd.Fstar)
    return out[()] if out.ndim == 0 else out


def cn_factor(xi: float, sd: SaddleData, n: int) -> complex:
    return complex(np.exp(log_cn_factor(xi, sd, n)))


def log_cn_factor(xi: float, sd: SaddleData, n: int) -> complex:
    if n < 1:
        raise DomainError("n must be >= 1")
    return complex(2.0 * n * sd.Fstar + xi * xi / (n * sd.rho**2))
