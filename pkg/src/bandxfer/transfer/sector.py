"""Nystrom discretization of the angular sectors K_j on the full (a, b) plane.

Coordinates m = (a + b)/2, s = a - b > 0 (unit Jacobian).  The sector kernel
factorizes as

    F2(a_1) F2(b_1) (W^2 / 2 pi) e^{-W^2 dm^2} e^{-W^2 ds^2 / 4} lambda_j(W^2 s_1 s_2)

(left-multiplied form, similar to the symmetric one), so matrices are
Kronecker products in (m, s) times a diagonal.  Nodes are s_i = i h, i >= 1:
every s-integrand is even in s and vanishes at s = 0, so the half-line
trapezoid rule keeps spectral accuracy.  Tr K^n = sum_j (2j + 1) Tr K_j^n.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigs

from ..angular import angular_eigenvalues
from ..saddle import SaddleData, weight_F2
from .cartesian import IterationBudgetError


@dataclass
class SectorEngine:
    sd: SaddleData
    h: float | None = None
    L: float = 7.0
    mRange: tuple | None = None
    sRange: tuple | None = None
    jMax: int = 2

    def __post_init__(self):
        sd = self.sd
        if self.h is None:
            self.h = 0.6 / sd.W
        h = self.h
        mlo, mhi = self.mRange if self.mRange else (-self.L, self.L)
        slo, shi = self.sRange if self.sRange else (0.0, 2.0 * self.L)
        self.m = h * np.arange(math.ceil(mlo / h), math.floor(mhi / h) + 1)
        self.s = h * np.arange(max(1, math.ceil(slo / h)), math.floor(shi / h) + 1)
        c = sd.W / math.sqrt(2.0 * math.pi) * h
        self.Km = c * np.exp(-(sd.W * np.subtract.outer(self.m, self.m)) ** 2)
        self._gs = c * np.exp(-0.25 * (sd.W * np.subtract.outer(self.s, self.s)) ** 2)
        M, S = np.meshgrid(self.m, self.s, indexing="ij")
        self.D2 = weight_F2(M + S / 2.0, sd) * weight_F2(M - S / 2.0, sd)
        self._Ks: dict = {}

    @classmethod
    def local(cls, sd: SaddleData, hW: float = 0.6, amp: float = 21.0) -> "SectorEngine":
        """Window around the saddle surface m ~ 0, s ~ a_+ - a_-, wide enough
        that the top eigenfunctions decay below ~e^{-amp}."""
        a1 = sd.alphaPlus.real * sd.W
        dm = math.sqrt(amp / (2.0 * a1))
        ds = math.sqrt(2.0 * amp / a1)
        s0 = 2.0 * sd.aPlus
        return cls(sd, h=hW / sd.W, mRange=(-dm, dm), sRange=(max(s0 - ds, 0.0), s0 + ds))

    @property
    def shape(self) -> tuple:
        return self.D2.shape

    @property
    def size(self) -> int:
        return self.D2.size

    def Ks(self, j: int) -> np.ndarray:
        if j not in self._Ks:
            T = self.sd.W**2 * np.multiply.outer(self.s, self.s)
            self._Ks[j] = self._gs * angular_eigenvalues(j, T)
        return self._Ks[j]

    def matrix(self, j: int) -> np.ndarray:
        return self.D2.reshape(-1, 1) * np.kron(self.Km, self.Ks(j))

    def apply(self, j: int, v: np.ndarray) -> np.ndarray:
        u = v.reshape(self.shape)
        return (self.D2 * (self.Km @ u @ self.Ks(j).T)).ravel()

    def eigenvalues(self, j: int, howMany: int | None = None, tol: float = 1e-13):
        """All eigenvalues (dense) or the `howMany` largest in modulus (Arnoldi),
        sorted by decreasing modulus."""
        if howMany is None or self.size <= 2500:
            ev = np.linalg.eigvals(self.matrix(j))
        else:
            op = LinearOperator((self.size, self.size), matvec=lambda v: self.apply(j, v), dtype=complex)
            v0 = np.abs(self.D2).ravel().astype(complex)
            try:
                ev = eigs(op, k=howMany, which="LM", tol=tol, v0=v0, return_eigenvectors=False,
                          ncv=max(2 * howMany + 10, 24), maxiter=2000)
            except ArpackNoConvergence as exc:
                raise IterationBudgetError(str(exc)) from exc
        ev = ev[np.argsort(-np.abs(ev))]
        return ev if howMany is None else ev[:howMany]

    def square(self, j: int) -> np.ndarray:
        """K_j^2 from the Kronecker structure, O(N^5) instead of O(N^6)."""
        Ks = self.Ks(j)
        X = np.einsum("cd,bd,df->bcf", Ks, self.D2, Ks, optimize=True)
        G = np.einsum("ab,be,bcf->acef", self.Km, self.Km, X, optimize=True)
        N = self.size
        return self.D2.reshape(-1, 1) * G.reshape(N, N)

    def trace_power(self, j: int, n: int) -> complex:
        """Tr K_j^n."""
        if n < 1:
            raise ValueError("n must be >= 1")
        if n == 1:
            return complex(np.sum(self.D2 * np.outer(np.diag(self.Km), np.diag(self.Ks(j)))))
        M2 = self.square(j)
        if n < 4:
            return complex(np.trace(M2)) if n == 2 else complex(np.sum(M2 * self.matrix(j).T))
        # n = 4p + r:  Tr M^n = Tr(A . A M^r) with A = M^{2p}
        p, r = divmod(n, 4)
        A = np.linalg.matrix_power(M2, p)
        B = A if r == 0 else A @ (self.matrix(j) if r == 1 else M2 if r == 2 else M2 @ self.matrix(j))
        return complex(np.sum(A * B.T))

    def total_trace(self, n: int, tol: float = 1e-14, jLimit: int = 200):
        """sum_j (2j + 1) Tr K_j^n, stopping once two successive sectors add
        less than `tol` relative.  Returns (trace, jUsed)."""
        total, small = 0.0 + 0.0j, 0
        for j in range(jLimit + 1):
            term = (2 * j + 1) * self.trace_power(j, n)
            total += term
            small = small + 1 if abs(term) <= tol * abs(total) else 0
            if small >= 2:
                return total, j
        raise IterationBudgetError(f"angular sum not converged by j={jLimit}")
