import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bandxfer.angular import angular_eigenvalue
from bandxfer.ensemble import covariance_profile
from bandxfer.hermite import model_lambda0
from bandxfer.saddle import saddle_data
from bandxfer.transfer import (CartesianEngine, IterationBudgetError, PolarBlockEngine, SchurError, SectorEngine,
                               SpectrumReport, f2_via_transfer, galerkin_A, gaussian_kernel, log_power_sum,
                               schur_function, schur_locate, spectrum, taylor_coefficients, xi_derivative,
                               xi_operator, xi_top_eigenvalue)
from bandxfer.transfer.trace import polar_trace_log


@pytest.fixture(scope="module")
def polar_small():
    return PolarBlockEngine(saddle_data(0.0, 4.0), perAxisOrder=10, jMax=3)


@pytest.fixture(scope="module")
def sector_small():
    sd = saddle_data(0.5, 2.0)
    return SectorEngine(sd, h=0.35, L=6.5)


# ---- Gaussian kernel and Galerkin matrices

def test_gaussian_kernel_normalized():
    x = np.linspace(-3, 3, 601)
    row = gaussian_kernel([0.0], x, 5.0)[0]
    assert np.sum(row) * (x[1] - x[0]) == pytest.approx(1.0, abs=1e-12)


def test_galerkin_rejects_order():
    with pytest.raises(ValueError):
        galerkin_A(saddle_data(0.0, 4.0), "+", 41)
    with pytest.raises(ValueError):
        galerkin_A(saddle_data(0.0, 4.0), "0", 4)


@pytest.mark.parametrize("E,W", [(0.5, 6.0), (0.0, 6.0)])
def test_galerkin_leading_entry_near_model(E, W):
    sd = saddle_data(E, W)
    A = galerkin_A(sd, "+", 8)
    # the model operator's top eigenvalue approximates the true one up to O(W^-1)
    lam = np.linalg.eigvals(A)
    top = lam[np.argmax(np.abs(lam))]
    assert abs(top - model_lambda0(sd.c("+"), W)) < 2e-2
    # complex symmetric (A(x, y) = A(y, x) with a real orthonormal reference)
    assert abs(top) < 1.0


def test_galerkin_conjugate_centers():
    sd = saddle_data(0.5, 6.0)
    lp = np.linalg.eigvals(galerkin_A(sd, "+", 8))
    lm = np.linalg.eigvals(galerkin_A(sd, "-", 8))
    # the two centers differ by a phase of the multiplier; top moduli agree
    assert np.max(np.abs(lp)) == pytest.approx(np.max(np.abs(lm)), rel=1e-6)


# ---- polar engine

def test_taylor_coefficients_reproduce_value():
    W, t0 = 3.0, 0.8
    e = taylor_coefficients(2, W, t0, 8)
    for t in (0.7, 0.8, 0.9):
        assert np.polyval(e[::-1], t) == pytest.approx(angular_eigenvalue(2, W * W * t), abs=1e-8)


def test_taylor_order_zero_is_scaled_skeleton():
    sd = saddle_data(0.0, 4.0)
    e = PolarBlockEngine(sd, 6, 2, taylorOrder=0)
    np.testing.assert_allclose(e.block(1), angular_eigenvalue(1, 16.0 * sd.t0) * e.skeleton, atol=1e-15)
    assert e.ordersUsed[1] == 0


def test_node_form_equals_power_sum():
    sd = saddle_data(0.5, 4.0)
    eng = PolarBlockEngine(sd, 5, 1)
    coeffs = np.array([0.3, -0.2, 0.05, 0.01])
    S = eng.s_matrix()
    direct = sum(c * np.linalg.matrix_power(S, r) @ eng.skeleton @ np.linalg.matrix_power(S, r)
                 for r, c in enumerate(coeffs))
    sig, V, Mt = eng.s_nodes
    P = np.polynomial.polynomial.polyval(np.multiply.outer(sig, sig), coeffs)
    np.testing.assert_allclose(V @ (P * Mt) @ V.T, direct, atol=1e-12)


def test_block_validation():
    with pytest.raises(ValueError):
        PolarBlockEngine(saddle_data(0.0, 4.0), 4, 1, taylorOrder=-1)


def test_polar_spectrum_sectors(polar_small):
    rep = spectrum(polar_small, 3)
    assert rep.sectors == [0, 1, 2]
    assert all(r < 1e-10 for r in rep.residuals)
    # top eigenvalue close to omega * l0+ * l0-, omega = -1 at the band center
    sd = polar_small.sd
    guess = sd.omega * model_lambda0(sd.c("+"), sd.W) * model_lambda0(sd.c("-"), sd.W)
    assert abs(rep.eigenvalues[0] - guess) < 0.02
    assert 0 < rep.gap < 1


def test_polar_vs_cartesian():
    sd = saddle_data(0.0, 3.0)
    lp = spectrum(PolarBlockEngine(sd, 16, 2), 2).eigenvalues[0]
    rep = spectrum(CartesianEngine(sd, hW=1.2), 2)
    assert abs(lp - rep.eigenvalues[0]) < 1e-3 * abs(lp)
    assert max(rep.residuals) <= 1e-6


def test_xi_zero_reduces_to_blocks(polar_small):
    K = xi_operator(polar_small, 0.0, 100, basis="hermite")
    D = polar_small.dim
    for i, j in enumerate(range(4)):
        np.testing.assert_allclose(K[i * D:(i + 1) * D, i * D:(i + 1) * D], polar_small.block(j), atol=1e-12)
    assert np.max(np.abs(K[:D, D:])) == 0.0


def test_xi_operator_validation(polar_small):
    with pytest.raises(ValueError):
        xi_operator(polar_small, 1.0, 0)
    with pytest.raises(ValueError):
        xi_operator(polar_small, 1.0, 10, k=5)
    with pytest.raises(ValueError):
        xi_operator(polar_small, 1.0, 10, basis="plane")


def test_xi_derivative_vanishes(polar_small):
    assert abs(xi_derivative(polar_small, 1000)) < 1e-10


def test_xi_top_eigenvalue_converges_to_xi_zero(polar_small):
    l0 = xi_top_eigenvalue(polar_small, 0.0, 1000, jMax=2, check=False)
    d = [abs(xi_top_eigenvalue(polar_small, 1.0, n, jMax=2, check=False) - l0) for n in (100, 1000)]
    # second order in xi / n
    assert d[1] < d[0] / 50


def test_trace_log_of_single_sector(polar_small):
    ev = np.linalg.eigvals(xi_operator(polar_small, 0.0, 3, k=0))
    assert polar_trace_log(polar_small, 0.0, 3).real < np.log(np.sum(np.abs(ev) ** 3) * 10)


# ---- sector engine and F2

def test_sector_trace_power_matches_dense(sector_small):
    M = sector_small.matrix(1)
    for n in (1, 2, 3, 5, 6):
        ref = np.trace(np.linalg.matrix_power(M, n))
        assert sector_small.trace_power(1, n) == pytest.approx(ref, rel=1e-10)
    with pytest.raises(ValueError):
        sector_small.trace_power(1, 0)


def test_sector_apply_matches_matrix(sector_small):
    v = np.random.default_rng(1).standard_normal(sector_small.size)
    np.testing.assert_allclose(sector_small.apply(2, v), sector_small.matrix(2) @ v, atol=1e-13)


def test_single_site_f2(sector_small):
    # n = 1: E[det(E - H)^2] = E^2 + 1
    r = f2_via_transfer(sector_small.sd, 0.0, 1, covariance_profile(1, 2.0), sector_small)
    assert r.value == pytest.approx(1.25, abs=1e-9)
    assert not r.phaseFlag


def test_frozen_f2_four_sites(sector_small):
    r = f2_via_transfer(sector_small.sd, 0.0, 4, covariance_profile(4, 2.0), sector_small)
    assert r.value.real == pytest.approx(0.2760935716708931, rel=1e-8)
    assert r.imagRatio < 1e-12


def test_f2_validation(sector_small):
    sd = sector_small.sd
    with pytest.raises(ValueError):
        f2_via_transfer(sd, 0.5, 4, covariance_profile(4, 2.0), sector_small)
    with pytest.raises(ValueError):
        f2_via_transfer(sd, 0.0, 4, covariance_profile(5, 2.0), sector_small)
    with pytest.raises(TypeError):
        f2_via_transfer(sd, 0.0, 4, covariance_profile(4, 2.0), object())


def test_log_power_sum_large_powers():
    vals = np.array([0.9, -0.5, 0.1j])
    mult = np.array([1.0, 3.0, 2.0])
    assert log_power_sum(vals, mult, 7) == pytest.approx(np.log(np.sum(mult * vals**7)), abs=1e-13)
    out = log_power_sum(vals, mult, 100000)
    assert out.real == pytest.approx(100000 * math.log(0.9), rel=1e-12)


# ---- Cartesian engine

@pytest.fixture(scope="module")
def cart():
    return CartesianEngine(saddle_data(0.0, 3.0), hW=1.5, marginScale=6.0)


def test_cartesian_linear(cart):
    rng = np.random.default_rng(0)
    v, w = rng.standard_normal((2, cart.size))
    np.testing.assert_array_equal(cart.apply(np.zeros(cart.size)), 0.0)
    np.testing.assert_allclose(cart.apply(2 * v + w), 2 * cart.apply(v) + cart.apply(w), atol=1e-12)


def test_cartesian_budget():
    eng = CartesianEngine(saddle_data(0.0, 3.0), hW=1.5, marginScale=6.0, applyBudget=3)
    with pytest.raises(IterationBudgetError):
        eng.top_eigenpairs(2)


# ---- spectrum reports and Schur complement

def test_report_round_trip():
    rep = SpectrumReport([0.5 + 0.1j, -0.2 + 0j], [1e-14, 2e-13], "polar", 0.6, 0.5, 4.0, sectors=[0, 1])
    back = SpectrumReport.from_json(rep.to_json())
    assert back == rep


def test_spectrum_rejects():
    with pytest.raises(ValueError):
        spectrum(None, 1)
    with pytest.raises(TypeError):
        spectrum(object(), 2)


def test_schur_diagonal():
    M = np.diag([0.9, 0.5])
    assert schur_locate(M, 0, 0.8) == pytest.approx(0.9, abs=1e-12)


def test_schur_validation():
    with pytest.raises(ValueError):
        schur_locate(np.eye(1), 0, 0.5)
    with pytest.raises(IndexError):
        schur_locate(np.eye(3), 3, 0.5)
    with pytest.raises(SchurError):
        schur_function(np.diag([1.0, 0.5]), 0, 0.5)


@settings(max_examples=20)
@given(st.integers(0, 2**31 - 1))
def test_schur_recovers_eigenvalue(seed):
    rng = np.random.default_rng(seed)
    n = 6
    M = np.diag(np.linspace(1.0, 0.2, n)) + 0.03 * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    ev = np.linalg.eigvals(M)
    top = ev[np.argmax(np.abs(ev))]
    z = schur_locate(M, 0, M[0, 0])
    assert abs(z - top) < 1e-10
    # scaling the matrix scales the root
    assert abs(schur_locate(2 * M, 0, 2 * M[0, 0]) - 2 * z) < 1e-10


def test_schur_on_polar_block(polar_small):
    B = polar_small.block(0)
    ev = np.linalg.eigvals(B)
    top = ev[np.argmax(np.abs(ev))]
    assert abs(schur_locate(B, 0, B[0, 0]) - top) < 1e-10
