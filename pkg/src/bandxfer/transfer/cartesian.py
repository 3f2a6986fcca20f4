"""Matrix-free Nystrom engine on Cartesian coordinates of Herm(2).

X = [[a, (x + iy)/sqrt 2], [(x - iy)/sqrt 2, b]] and Tr(X - Y)^2 is the sum of
four squared coordinate differences.  The diagonal pair is rotated to
p = (a + b)/sqrt 2, q = (a - b)/sqrt 2 (orthogonal, so the Gaussian factor
still separates).  The eigenvalue surface of interest is the 2-sphere
q^2 + x^2 + y^2 = 2 a_+^2 at p ~ 0, so p gets a short range.

Applied operator (similar to the symmetric form F B F):

    v -> F2(X) * (B_p x B_q x B_x x B_y) v,
    F2(X) = det(X - iE/2) exp(-Tr(X + iE/2)^2 / 2 + 2 F*).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigs

from ..saddle import SaddleData
from .galerkin import gaussian_kernel


class IterationBudgetError(RuntimeError):
    """The Arnoldi iteration exhausted its budget without converging."""


def _axis(center_radius: float, margin: float, h: float) -> np.ndarray:
    n = int(math.ceil((center_radius + margin) / h))
    return h * np.arange(-n, n + 1)


@dataclass
class CartesianEngine:
    sd: SaddleData
    hW: float = 1.0
    marginScale: float = 12.0
    applyBudget: int = 4000
    applyCount: int = field(default=0, init=False)

    def __post_init__(self):
        sd = self.sd
        h = self.hW / sd.W
        margin = math.sqrt(self.marginScale / (sd.alphaPlus.real * sd.W))
        r = math.sqrt(2.0) * sd.aPlus
        self.h = h
        self.p = _axis(0.0, margin, h)
        self.q = _axis(r, margin, h)
        self.x = self.q.copy()
        self.y = self.q.copy()
        self.grid = {"p": self.p, "q": self.q, "x": self.x, "y": self.y}
        self.weights = {k: np.full(v.shape, h) for k, v in self.grid.items()}
        self._B = {k: gaussian_kernel(v, v, sd.W) * h for k, v in self.grid.items()}
        P, Q, X, Y = np.meshgrid(self.p, self.q, self.x, self.y, indexing="ij")
        a = (P + Q) / math.sqrt(2.0)
        b = (P - Q) / math.sqrt(2.0)
        iE = 0.5j * sd.E
        det = (a - iE) * (b - iE) - 0.5 * (X * X + Y * Y)
        tr2 = a * a + b * b + X * X + Y * Y + 2.0 * iE * (a + b) + 2.0 * iE * iE
        self.F2 = det * np.exp(-0.5 * tr2 + 2.0 * sd.Fstar)

    @property
    def shape(self) -> tuple:
        return self.F2.shape

    @property
    def size(self) -> int:
        return self.F2.size

    def convolve(self, v: np.ndarray) -> np.ndarray:
        """Four sequential 1D Gaussian convolutions."""
        u = v.reshape(self.shape)
        for ax, key in enumerate(("p", "q", "x", "y")):
            u = np.moveaxis(np.tensordot(self._B[key], u, axes=([1], [ax])), 0, ax)
        return u

    def apply(self, v: np.ndarray) -> np.ndarray:
        self.applyCount += 1
        if self.applyCount > self.applyBudget:
            raise IterationBudgetError(f"apply budget {self.applyBudget} exhausted")
        return (self.F2 * self.convolve(v)).ravel()

    def operator(self, scale: complex = 1.0) -> LinearOperator:
        return LinearOperator((self.size, self.size), matvec=lambda v: scale * self.apply(v), dtype=complex)

    def top_eigenpairs(self, howMany: int = 2, tol: float = 1e-12, ncv: int | None = None, seed: int = 0):
        """Largest-modulus eigenpairs by restarted Arnoldi (ARPACK)."""
        rng = np.random.default_rng(seed)
        v0 = (rng.standard_normal(self.size) + 1j * rng.standard_normal(self.size)) * np.abs(self.F2.ravel())
        ncv = ncv or max(2 * howMany + 10, 20)
        try:
            vals, vecs = eigs(self.operator(), k=howMany, which="LM", tol=tol, ncv=ncv,
                              v0=v0, maxiter=max(1, self.applyBudget // ncv))
        except ArpackNoConvergence as exc:
            raise IterationBudgetError(str(exc)) from exc
        except IterationBudgetError:
            raise
        order = np.argsort(-np.abs(vals))
        return vals[order], vecs[:, order]
