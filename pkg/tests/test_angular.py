import math

import numpy as np
import pytest
from hypothesis import example, given
from hypothesis import strategies as st

from bandxfer.angular import (AngularPoint, addition_theorem, angular_eigenvalue, angular_eigenvalue_quadrature,
                              angular_eigenvalue_taylor, angular_eigenvalues, assoc_legendre, asymptotic_eigenvalue,
                              cos_mode_matrices, cos_mode_matrix, kernel_overlap_sq, kstar_apply_check, legendre,
                              mode_normalizer, nu_weight, param_matrices, spherical_mode)
from bandxfer.saddle import DomainError, saddle_data

js = st.integers(0, 8)
Ts = st.floats(0.05, 60.0)


# ---- closed forms

@given(Ts)
def test_j0_closed_form(T):
    assert angular_eigenvalue(0, T) == pytest.approx(-math.expm1(-T), rel=1e-14)


def test_j1_at_two():
    # int_0^2 e^{-u} (1 - u) du = 2 e^{-2}
    assert angular_eigenvalue(1, 2.0) == pytest.approx(2 * math.exp(-2.0), rel=1e-15)


def test_frozen_j3():
    assert angular_eigenvalue(3, 10.0) == pytest.approx(0.2801325677949065, rel=1e-13)


def test_frozen_taylor():
    np.testing.assert_allclose(angular_eigenvalue_taylor(2, 3.0, 3),
                               [0.11758937, 0.07096829, 0.00371231, -0.0020624], atol=1e-8)


# ---- validation

@pytest.mark.parametrize("T", [0.0, -1.0])
def test_nonpositive_T(T):
    with pytest.raises(DomainError):
        angular_eigenvalue(1, T)


def test_legendre_domain():
    with pytest.raises(DomainError):
        legendre(2, 1.5)


def test_quadrature_order_floor():
    with pytest.raises(DomainError):
        kstar_apply_check(1, 1.0, quad_order=16)


def test_nu_weight_domain():
    with pytest.raises(DomainError):
        nu_weight(0.1, -0.1, 1.2, 1.0, saddle_data(0.0, 2.0))


def test_cos_mode_needs_k_below_jmax():
    with pytest.raises(DomainError):
        cos_mode_matrix(5, 3, 0.1)


# ---- oracles

@given(js, Ts)
def test_exact_vs_quadrature(j, T):
    assert angular_eigenvalue(j, T) == pytest.approx(angular_eigenvalue_quadrature(j, T, 256), abs=1e-12)


@given(js, Ts)
def test_bessel_form_vs_exact(j, T):
    assert float(angular_eigenvalues(j, T)) == pytest.approx(angular_eigenvalue(j, T), abs=1e-13)


@pytest.mark.parametrize("j,T", [(0, 0.5), (1, 2.0), (2, 10.0), (4, 50.0)])
def test_kernel_eigenfunction(j, T):
    assert kstar_apply_check(j, T) < 1e-10


@given(js, Ts)
def test_eigenvalue_bounds(j, T):
    lam = angular_eigenvalue(j, T)
    assert abs(lam) <= angular_eigenvalue(0, T) + 1e-15


@given(st.integers(0, 3), st.floats(200.0, 2000.0))
def test_large_T_asymptotics(j, T):
    assert angular_eigenvalue(j, T) == pytest.approx(asymptotic_eigenvalue(j, T), abs=(j * (j + 1)) ** 2 / T**2 + 1e-12)


@given(st.integers(0, 4), st.floats(1.0, 20.0))
def test_taylor_first_coefficient(j, T0):
    c = angular_eigenvalue_taylor(j, T0, 1)
    h = 1e-4
    fd = (angular_eigenvalue(j, T0 + h) - angular_eigenvalue(j, T0 - h)) / (2 * h)
    assert c[0] == pytest.approx(angular_eigenvalue(j, T0), abs=1e-14)
    assert c[1] == pytest.approx(fd, abs=1e-7)


def test_zero_T_vectorized():
    assert angular_eigenvalues(2, np.array([0.0, -1.0])).tolist() == [0.0, 0.0]


# ---- Legendre machinery

u01 = st.floats(0.0, 1.0)
angles = st.floats(0.0, 2 * math.pi)


@given(st.integers(0, 6), u01, angles, u01, angles)
@example(1, 1e-9, 0.0, 0.5, 0.0)
def test_addition_theorem(j, u1, t1, u2, t2):
    # cos of the angle on the sphere equals 1 - 2|(U1 U2^*)_{12}|^2
    U1, U2 = param_matrices(u1, t1), param_matrices(u2, t2)
    x = 1.0 - 2.0 * kernel_overlap_sq(U1, U2)
    assert addition_theorem(j, u1, t1, u2, t2) == pytest.approx(legendre(j, float(x)), abs=1e-10)


def test_point_matrix_unitary():
    U = AngularPoint(0.6, 1.1).matrix()
    np.testing.assert_allclose(U @ U.conj().T, np.eye(2), atol=1e-15)
    np.testing.assert_allclose(U, param_matrices(0.6, 1.1), atol=1e-15)


@pytest.mark.parametrize("j,k", [(0, 0), (2, 1), (3, -2), (5, 5)])
def test_mode_normalization(j, k):
    # int |phi_{j,k}|^2 dU = 1 with dU = dx dtheta / (4 pi)
    x, w = np.polynomial.legendre.leggauss(64)
    val = mode_normalizer(j, k) ** 2 * np.sum(w * assoc_legendre(j, abs(k), x) ** 2) / 2.0
    assert val == pytest.approx(1.0, rel=1e-12)
    assert abs(spherical_mode(j, k, 0.0, 0.0)) == pytest.approx(math.sqrt(2 * j + 1) if k == 0 else 0.0, abs=1e-12)


@given(st.integers(0, 3), st.floats(-20.0, 20.0))
def test_cos_mode_is_unitary_compression(k, s):
    N = cos_mode_matrix(k, 8, s)
    assert np.linalg.norm(N, 2) <= 1.0 + 1e-12
    np.testing.assert_allclose(N, N.T, atol=1e-14)


def test_cos_mode_identity_and_stack():
    np.testing.assert_allclose(cos_mode_matrix(0, 6, 0.0), np.eye(7), atol=1e-13)
    s = np.array([0.3, -1.0, 4.0])
    stack = cos_mode_matrices(1, 5, s)
    for i, si in enumerate(s):
        np.testing.assert_allclose(stack[i], cos_mode_matrix(1, 5, si), atol=1e-13)


def test_cos_mode_small_s_derivative():
    # d/ds N(s) at 0 is -i times the matrix of x, which couples j to j +- 1 only
    h = 1e-6
    D = (cos_mode_matrix(0, 5, h) - cos_mode_matrix(0, 5, -h)) / (2 * h)
    mask = np.abs(np.subtract.outer(np.arange(6), np.arange(6))) != 1
    assert np.max(np.abs(D[mask])) < 1e-8
    assert abs(D[0, 1]) == pytest.approx(1 / math.sqrt(3), rel=1e-6)
