"""Discretizations of the transfer operator K(xi)."""
from .cartesian import CartesianEngine, IterationBudgetError
from .galerkin import galerkin_A, gaussian_kernel
from .polar import PolarBlockEngine, polar_blocks, taylor_coefficients, xi_derivative, xi_operator, xi_top_eigenvalue
from .sector import SectorEngine
from .spectral import SchurError, SpectrumReport, schur_function, schur_locate, spectrum
from .trace import TransferF2, f2_ratio, f2_via_transfer, log_power_sum

__all__ = [
    "CartesianEngine", "IterationBudgetError", "galerkin_A", "gaussian_kernel", "PolarBlockEngine",
    "polar_blocks", "taylor_coefficients", "xi_derivative", "xi_operator", "xi_top_eigenvalue",
    "SectorEngine", "SchurError", "SpectrumReport", "schur_function", "schur_locate", "spectrum",
    "TransferF2", "f2_ratio", "f2_via_transfer", "log_power_sum",
]
