"""Polar Hermite-Galerkin engine for the transfer operator.

In eigenvalue coordinates (a, b), a > b, with g(a, b) = (a - b) f the angular
sector j of K acts by the kernel

    lambda_j(W^2 s_1 s_2) A(a_1, a_2) A(b_1, b_2),   s = a - b,

on Lebesgue measure.  The basis is psi^+_k(a - a_+) psi^-_l(b - a_-).  The
angular factor is Taylor expanded in t = s_1 s_2 around t0 = (a_+ - a_-)^2 and
re-collected in powers of s_1^r s_2^r, so each block is a short sum of
Kronecker sandwiches S^r (A_+ x A_-) S^r.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.linalg import eigs
from scipy.special import erfc

from ..angular import angular_eigenvalue, angular_eigenvalue_taylor, angular_eigenvalues, cos_mode_matrices
from ..hermite import AccuracyError

from ..saddle import SaddleData
from .galerkin import basis_for, galerkin_A

MAX_TAYLOR_ORDER = 12


def taylor_coefficients(j: int, W: float, t0: float, order: int) -> np.ndarray:
    """e_r with lambda_j(W^2 t) ~ sum_r e_r t^r, exact up to `order` around t0."""
    d = angular_eigenvalue_taylor(j, W * W * t0, order)
    d = d * (W * W) ** np.arange(order + 1)  # derivatives in t
    e = np.zeros(order + 1)
    for r in range(order + 1):
        for q in range(r + 1):
            e[q] += d[r] * math.comb(r, q) * (-t0) ** (r - q)
    return e


@dataclass
class PolarBlockEngine:
    sd: SaddleData
    perAxisOrder: int = 24
    jMax: int = 8
    taylorOrder: int = 6
    taylorTol: float = 1e-8
    strict: bool = False
    blocks: dict = field(default_factory=dict, repr=False)
    remainders: dict = field(default_factory=dict, repr=False)
    ordersUsed: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.taylorOrder < 0:
            raise ValueError("taylorOrder must be >= 0")
        if self.jMax < 0 or self.perAxisOrder < 1:
            raise ValueError("jMax >= 0 and perAxisOrder >= 1 required")
        K = self.perAxisOrder
        self.Aplus = galerkin_A(self.sd, "+", K)
        self.Aminus = galerkin_A(self.sd, "-", K)
        self.skeleton = np.kron(self.Aplus, self.Aminus)
        self._nodes = None
        self._nodeBlocks: dict = {}

    @property
    def dim(self) -> int:
        return self.perAxisOrder**2

    def s_matrix(self) -> np.ndarray:
        """Galerkin matrix of multiplication by s = a - b (real symmetric)."""
        K = self.perAxisOrder
        Xp = basis_for(self.sd, "+", K).position_matrix()
        Xm = basis_for(self.sd, "-", K).position_matrix()
        I = np.eye(K)
        return 2.0 * self.sd.aPlus * np.eye(K * K) + np.kron(Xp, I) - np.kron(I, Xm)

    def s_power(self, r: int) -> np.ndarray:
        return np.linalg.matrix_power(self.s_matrix(), r)

    @property
    def s_nodes(self):
        """Eigen-decomposition S = V diag(sigma) V^T.

        sum_r e_r S^r M S^r = V [P(sigma_i sigma_l) * (V^T M V)] V^T for the
        polynomial P(t) = sum_r e_r t^r, so the angular factor only has to be
        known at the products of node pairs.
        """
        if self._nodes is None:
            sig, V = np.linalg.eigh(self.s_matrix())
            self._nodes = (sig, V, V.T @ self.skeleton @ V)
        return self._nodes

    def envelope_mass(self) -> float:
        """Mass of |psi_0^+(a) psi_0^-(b)|^2 on the excluded side a < b."""
        a1p, a1m = self.sd.alphaPlus.real, self.sd.alphaMinus.real
        var = 1.0 / (4.0 * a1p * self.sd.W) + 1.0 / (4.0 * a1m * self.sd.W)
        return float(0.5 * erfc(2.0 * self.sd.aPlus / math.sqrt(2.0 * var)))

    def angular_factor(self, j: int) -> np.ndarray:
        """lambda_j(W^2 sigma_i sigma_l) at the node pairs, Taylor-approximated.

        The order is raised by 2 while the node remainder exceeds taylorTol;
        past MAX_TAYLOR_ORDER the exact values are used (order recorded as
        -1), or AccuracyError is raised when `strict`.
        """
        sd = self.sd
        sig = self.s_nodes[0]
        t = np.multiply.outer(sig, sig)
        exact = angular_eigenvalues(j, sd.W**2 * np.clip(t, 0.0, None))
        if self.taylorOrder == 0:
            self.remainders[j] = float(np.max(np.abs(exact - angular_eigenvalue(j, sd.W**2 * sd.t0))))
            self.ordersUsed[j] = 0
            return np.full_like(t, angular_eigenvalue(j, sd.W**2 * sd.t0))
        order = self.taylorOrder
        while True:
            e = taylor_coefficients(j, sd.W, sd.t0, order)
            approx = np.polynomial.polynomial.polyval(t, e)
            rem = float(np.max(np.abs(exact - approx)))
            if rem <= self.taylorTol:
                self.remainders[j], self.ordersUsed[j] = rem, order
                return approx
            if order + 2 > MAX_TAYLOR_ORDER:
                break
            order += 2
        if self.strict:
            raise AccuracyError(f"Taylor remainder {rem:.2e} at order {order} for j={j}")
        self.remainders[j], self.ordersUsed[j] = 0.0, -1
        return exact

    def block(self, j: int) -> np.ndarray:
        if j < 0:
            raise ValueError("j must be >= 0")
        if j not in self.blocks:
            if self.taylorOrder == 0:
                self.angular_factor(j)
                self.blocks[j] = angular_eigenvalue(j, self.sd.W**2 * self.sd.t0) * self.skeleton
            else:
                _, V, Mt = self.s_nodes
                self.blocks[j] = V @ (self.angular_factor(j) * Mt) @ V.T
        return self.blocks[j]

    def node_block(self, j: int) -> np.ndarray:
        """V^T block_j V: the block in the eigenbasis of S (orthogonally
        similar, so same spectrum)."""
        if j not in self._nodeBlocks:
            self._nodeBlocks[j] = self.angular_factor(j) * self.s_nodes[2]
        return self._nodeBlocks[j]


def polar_blocks(engine: PolarBlockEngine) -> dict:
    """Blocks j = 0..jMax, each of size perAxisOrder^2."""
    return {j: engine.block(j) for j in range(engine.jMax + 1)}


def _sandwich(Nn: np.ndarray, L: np.ndarray, right: np.ndarray | None = None) -> np.ndarray:
    """Nn L Nr for node-diagonal angular factors Nn[i] (J x J), L in
    j-major node ordering."""
    D, J = Nn.shape[0], Nn.shape[1]
    Nr = Nn if right is None else right
    X = L.reshape(J, D, J, D)
    X = np.einsum("ijk,kilm->jilm", Nn, X, optimize=True)
    X = np.einsum("jilm,mln->jinm", X, Nr, optimize=True)
    return X.reshape(J * D, J * D)


def _node_L(engine: PolarBlockEngine, js) -> np.ndarray:
    D, J = engine.dim, len(js)
    L = np.zeros((J * D, J * D), dtype=complex)
    for i, j in enumerate(js):
        L[i * D:(i + 1) * D, i * D:(i + 1) * D] = engine.node_block(j)
    return L


def xi_operator(engine: PolarBlockEngine, xi: float, n: int, k: int = 0, jMax: int | None = None,
                basis: str = "nodes") -> np.ndarray:
    """Matrix of K(xi) in angular sector k on (Galerkin space) x (j = |k|..jMax).

    Ordering is j-major.  The xi-dependent multiplier contributes the angular
    matrix N(xi s / (2 n rho)) on each side.  In the eigenbasis of the real
    symmetric Galerkin matrix S ("nodes", the default) that factor is diagonal
    in the node index and N is evaluated exactly at each eigenvalue of S.
    basis="hermite" maps back to the Hermite product basis of polar_blocks.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    jMax = engine.jMax if jMax is None else jMax
    k = abs(k)
    if k > jMax:
        raise ValueError("need |k| <= jMax")
    js = list(range(k, jMax + 1))
    sig, V, _ = engine.s_nodes
    K = _node_L(engine, js)
    if xi != 0.0:
        Nn = cos_mode_matrices(k, jMax, xi * sig / (2.0 * n * engine.sd.rho))  # (D, J, J)
        K = _sandwich(Nn, K)
    if basis == "nodes":
        return K
    if basis != "hermite":
        raise ValueError("basis must be 'nodes' or 'hermite'")
    J, D = len(js), engine.dim
    X = K.reshape(J, D, J, D)
    X = np.einsum("pa,jalb,qb->jplq", V, X, V, optimize=True)
    return X.reshape(J * D, J * D)


def _top_pair(M: np.ndarray, vectors: bool = False):
    """Largest-modulus eigenpair of a dense matrix by Arnoldi."""
    v0 = np.ones(M.shape[0], dtype=complex)
    vals, vecs = eigs(M, k=1, which="LM", tol=1e-14, v0=v0, ncv=min(M.shape[0] - 1, 30))
    return (vals[0], vecs[:, 0]) if vectors else vals[0]


def xi_top_eigenvalue(engine: PolarBlockEngine, xi: float, n: int, jMax: int = 3,
                      check: bool = True, tol: float = 1e-10) -> complex:
    """Top eigenvalue of K(xi) (sector k = 0).  With `check`, repeats at
    jMax + 2 and raises AccuracyError if the change exceeds `tol`."""
    lam = _top_pair(xi_operator(engine, xi, n, 0, jMax))
    if check:
        lam2 = _top_pair(xi_operator(engine, xi, n, 0, jMax + 2))
        if abs(lam2 - lam) > tol * abs(lam2):
            raise AccuracyError(f"jMax={jMax} insufficient: change {abs(lam2 - lam):.2e}")
        return complex(lam2)
    return complex(lam)


def xi_derivative(engine: PolarBlockEngine, n: int, jMax: int = 3) -> complex:
    """d lambda_0 / d xi at xi = 0 by first-order perturbation theory,
    y^H K'(0) x / y^H x with x, y the right/left top eigenvectors."""
    K0 = xi_operator(engine, 0.0, n, 0, jMax)
    _, x = _top_pair(K0, vectors=True)
    _, y = _top_pair(K0.conj().T, vectors=True)
    sig = engine.s_nodes[0]
    # d/dxi of N(xi s/(2 n rho)) at 0, by a symmetric difference in xi
    h = 1e-4
    sc = sig / (2.0 * n * engine.sd.rho)
    dN = (cos_mode_matrices(0, jMax, h * sc) - cos_mode_matrices(0, jMax, -h * sc)) / (2.0 * h)
    eye = np.broadcast_to(np.eye(jMax + 1), dN.shape)
    dK = _sandwich(dN, K0, eye) + _sandwich(eye, K0, dN)
    return complex(y.conj() @ dK @ x / (y.conj() @ x))
