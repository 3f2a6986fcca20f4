"""Spectrum extraction for the transfer-operator engines and the
Schur-complement eigenvalue locator."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .cartesian import CartesianEngine
from .polar import PolarBlockEngine
from .sector import SectorEngine


class SchurError(RuntimeError):
    """Secant iteration failed or hit a singular resolvent."""


@dataclass
class SpectrumReport:
    eigenvalues: list
    residuals: list
    engine: str
    gap: float
    E: float = 0.0
    W: float = 0.0
    xi: float = 0.0
    n: int | None = None
    sectors: list = field(default_factory=list)

    def to_json(self) -> str:
        d = asdict(self)
        d["eigenvalues"] = [[float(z.real), float(z.imag)] for z in self.eigenvalues]
        d["residuals"] = [float(r) for r in self.residuals]
        d["sectors"] = [int(j) for j in self.sectors]
        return json.dumps(d)

    @classmethod
    def from_json(cls, text: str) -> "SpectrumReport":
        d = json.loads(text)
        d["eigenvalues"] = [complex(re, im) for re, im in d["eigenvalues"]]
        return cls(**d)


def _dense_pairs(M: np.ndarray):
    vals, vecs = np.linalg.eig(M)
    res = np.linalg.norm(M @ vecs - vecs * vals, axis=0) / np.linalg.norm(vecs, axis=0)
    return vals, res


def _gap(vals) -> float:
    if len(vals) < 2 or vals[0] == 0:
        return float("nan")
    return float(1.0 - abs(vals[1]) / abs(vals[0]))


def spectrum(engine, howMany: int = 2) -> SpectrumReport:
    """Leading eigenvalues ordered by modulus, with residuals.

    Polar and sector engines: dense eigendecomposition per angular block
    j = 0..jMax, merged by modulus (each j carries multiplicity 2j + 1, listed
    once with its sector label).  Cartesian engine: restarted Arnoldi.
    """
    if howMany < 2:
        raise ValueError("howMany must be >= 2")
    if not isinstance(engine, (CartesianEngine, PolarBlockEngine, SectorEngine)):
        raise TypeError(f"unsupported engine {type(engine).__name__}")
    sd = engine.sd
    if isinstance(engine, CartesianEngine):
        vals, vecs = engine.top_eigenpairs(howMany)
        res = [float(np.linalg.norm(engine.apply(v) - lam * v) / np.linalg.norm(v)) for lam, v in zip(vals, vecs.T)]
        return SpectrumReport(list(vals), res, "cartesian", _gap(vals), sd.E, sd.W, sectors=[-1] * len(vals))
    if isinstance(engine, PolarBlockEngine):
        tag, jmax = "polar", engine.jMax
        matrices = ((j, engine.block(j)) for j in range(jmax + 1))
    else:
        tag, jmax = "sector", engine.jMax
        matrices = ((j, engine.matrix(j)) for j in range(jmax + 1))
    allv, allr, allj = [], [], []
    for j, M in matrices:
        vals, res = _dense_pairs(M)
        order = np.argsort(-np.abs(vals))[:howMany]
        allv.extend(vals[order])
        allr.extend(res[order])
        allj.extend([j] * len(order))
    order = np.argsort(-np.abs(np.array(allv)), kind="stable")[:howMany]
    vals = [complex(allv[i]) for i in order]
    return SpectrumReport(vals, [float(allr[i]) for i in order], tag, _gap(vals), sd.E, sd.W,
                          sectors=[int(allj[i]) for i in order])


def schur_function(matrix: np.ndarray, pivotIndex: int, z: complex) -> complex:
    """F(z) = M_pp - z - M[p, rest] (M_rest - z)^{-1} M[rest, p]."""
    M = np.asarray(matrix)
    p = pivotIndex
    rest = np.r_[0:p, p + 1:M.shape[0]]
    kappa = M[rest, p]
    kappa_star = M[p, rest]
    Mh = M[np.ix_(rest, rest)] - z * np.eye(len(rest))
    try:
        g = np.linalg.solve(Mh, kappa)
    except np.linalg.LinAlgError as exc:
        raise SchurError(f"singular resolvent at z={z}") from exc
    if not np.all(np.isfinite(g)):
        raise SchurError(f"singular resolvent at z={z}")
    return complex(M[p, p] - z - kappa_star @ g)


def schur_locate(matrix: np.ndarray, pivotIndex: int, z0: complex, tol: float = 1e-12,
                 maxIter: int = 100) -> complex:
    """Secant root of the Schur function started at z0 (and a nearby point)."""
    M = np.asarray(matrix, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 2:
        raise ValueError("need a square matrix of dimension >= 2")
    if not 0 <= pivotIndex < M.shape[0]:
        raise IndexError("pivotIndex out of range")
    z_prev = complex(z0)
    z = z_prev * (1.0 + 1e-4) + 1e-6
    f_prev = schur_function(M, pivotIndex, z_prev)
    if abs(f_prev) <= tol:
        return z_prev
    for _ in range(maxIter):
        f = schur_function(M, pivotIndex, z)
        if abs(f) <= tol:
            return z
        if f == f_prev:
            raise SchurError("secant step degenerate")
        z, z_prev, f_prev = z - f * (z - z_prev) / (f - f_prev), z, f
    raise SchurError(f"no convergence in {maxIter} iterations")
