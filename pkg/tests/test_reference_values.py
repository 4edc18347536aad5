"""Worked values: closed forms, exact identities and small oracles."""

import cmath
import math

import mpmath as mp
import numpy as np
import pytest

from shintani import (
    F_prod,
    G_prod,
    GammaPole,
    Method,
    MultiIndex,
    ParityType,
    ShintaniDatum,
    L_completed,
    L_normalized,
    L_ordinary,
    R_family,
    bernoulli_B,
    bilateral_r1,
    continue_L,
    contour_L,
    dirichlet_L,
    e_of,
    fourier_F,
    gamma_C,
    gamma_R,
    integral_L,
    phi,
    reduce_torus,
    special_value_pos,
)
from shintani.lfunction import derivative_residual, fe_residual
from shintani.series import tail_bound
from shintani.taylor import phi_coeffs

CATALAN4 = 4 * 0.91596559417721901505
BETA = ShintaniDatum([[1.0]], [0.5], [0.5])
HALF2 = ShintaniDatum(np.eye(2), [0.5, 0.5], [0.5, 0.5])


# -- kernel and gamma factors ------------------------------------------------------

def test_e_of_basic():
    assert e_of(0) == 1
    assert e_of(0.5) == pytest.approx(-1)
    assert e_of(0.25) == pytest.approx(1j)


def test_phi_special_points():
    assert phi(0.0, 0.3, 0.5) == pytest.approx(0.5, abs=1e-15)
    for t in (-1.7, 0.2, 3.0):
        assert phi(t, 0.5, 0.5) == pytest.approx(0.5 / math.cosh(math.pi * t), rel=1e-14)


def test_phi_geometric_series():
    t, x, y = 0.5, 0.3, 0.25
    partial = sum(cmath.exp(2j * math.pi * m * y) * math.exp(-2 * math.pi * t * (x + m)) for m in range(61))
    assert abs(phi(t, x, y) - partial) <= 1e-14


def test_F_and_G_at_origin():
    d = ShintaniDatum([[1.0, 0.4], [-0.5, 2.0]], [0.3, 0.8], [0.15, 0.6])
    base = np.prod(1 / (1 - e_of(d.y)))
    assert F_prod(np.zeros(2), d) == pytest.approx(base, rel=1e-15)
    assert G_prod(np.zeros(2), d) == pytest.approx(e_of(float(d.x @ d.y)) * base, rel=1e-15)
    assert F_prod(np.ones(1), BETA) == pytest.approx(0.5 / math.cosh(math.pi), rel=1e-14)


def test_gamma_values():
    assert gamma_R(1) == pytest.approx(1, rel=1e-14)
    assert gamma_C(1) == pytest.approx(1 / math.pi, rel=1e-14)
    s = 0.3 + 0.2j
    rhs = 4j / (e_of(s / 2) - e_of(-s / 2))
    assert gamma_C(s) * gamma_C(1 - s) == pytest.approx(rhs, rel=1e-12)


def test_reduce_torus_examples():
    x0, _, kx, _, phase = reduce_torus([0.4], [0.3])
    assert kx[0] == 0 and phase == 1
    x0, _, kx, _, phase = reduce_torus([1.5], [0.25])
    assert x0[0] == 0.5 and kx[0] == 1
    assert phase == pytest.approx(-1j)
    s = [1.6 + 0.2j]
    a = L_normalized(s, ShintaniDatum([[1.2]], [0.35], [2.25]), 1).value
    b = L_normalized(s, ShintaniDatum([[1.2]], [0.35], [0.25]), 1).value
    assert abs(a - b) <= 1e-14


# -- series ------------------------------------------------------------------------

def test_series_examples():
    one = dirichlet_L([2], BETA)
    assert abs(one.value - CATALAN4) <= 1e-12 and one.err <= 1e-12
    # the series needs strictly positive entries; for A = I it factors into
    # degree-one sums, and the orthant integral takes A = I directly
    assert abs(dirichlet_L([2], BETA).value ** 2 - CATALAN4 ** 2) <= 1e-11
    d1 = ShintaniDatum([[1.0]], [0.3], [0.7])
    d2 = ShintaniDatum([[2.0]], [0.3], [0.7])
    assert dirichlet_L([3], d2).value == pytest.approx(dirichlet_L([3], d1).value / 8, rel=1e-13)


def test_bilateral_examples():
    assert abs(bilateral_r1(2, 1.0, 0.5, 0.5, 1).value - CATALAN4) <= 1e-12
    assert abs(bilateral_r1(2, 1.0, 0.5, 0.5, 0).value) <= 1e-12
    pos = bilateral_r1(3, 1.0, 0.3, 0.7, 0).value
    neg = bilateral_r1(3, -1.0, 0.3, 0.7, 0).value
    assert neg == pytest.approx(-pos, rel=1e-14)


def test_tail_bound_examples():
    bounds = [tail_bound(BETA, [2.0], M) for M in (10, 100, 1000)]
    assert bounds[0] > bounds[1] > bounds[2] > 0
    assert bounds[1] >= 9.95e-3


# -- quadrature --------------------------------------------------------------------

def test_integral_examples():
    got = integral_L([2], BETA)
    assert abs(got.value - CATALAN4) <= 1e-10 and got.err <= 1e-10
    # phi(-t, x, y) = -e(-y) phi(t, 1 - x, 1 - y)
    neg = integral_L([2], ShintaniDatum([[-1.0]], [0.3], [0.25])).value
    ref = -e_of(-0.25) * integral_L([2], ShintaniDatum([[1.0]], [0.7], [0.75])).value
    assert abs(neg - ref) <= 1e-12
    assert abs(integral_L([2, 2], HALF2).value - CATALAN4 ** 2) <= 1e-10


def test_contour_examples():
    assert abs(L_normalized([-2], BETA, 1, method=Method.CONTOUR).value + 0.125) <= 1e-12
    d = ShintaniDatum([[-1.6]], [0.27], [0.82])
    assert abs(contour_L([0.7], d).value - integral_L([0.7], d).value) <= 1e-12


def test_fourier_at_zero_frequency():
    d = ShintaniDatum([[1.3, -0.4], [0.6, 0.9]], [0.3, 0.7], [0.25, 0.55])
    out = fourier_F(d, [0.0, 0.0])
    closed = (1j ** 2 / abs(d.detA) * e_of(-float(d.y @ d.x))
              * np.prod(1 / (1 - e_of(1 - d.x))))
    assert out.rhs == pytest.approx(closed, rel=1e-14)
    assert out.residual <= 1e-10


# -- L-function family -----------------------------------------------------------------

def test_ordinary_examples():
    d = ShintaniDatum([[1.2, 0.5], [0.4, 1.5]], [0.3, 0.6], [0.2, 0.7])
    s = [1.9 + 0.3j, 1.4]
    assert abs(dirichlet_L(s, d).value - L_ordinary(s, d).value) <= 1e-9
    mixed = L_ordinary([2], ShintaniDatum([[-1.3]], [0.4], [0.3]))
    assert np.isfinite(mixed.value) and mixed.err <= 1e-9


def test_normalized_examples():
    assert abs(L_normalized([2], BETA, 1).value - CATALAN4) <= 1e-12
    assert abs(L_normalized([2], BETA, 0).value) <= 1e-12


def test_completed_examples():
    assert L_completed([2], BETA, 1).value == pytest.approx(gamma_R(3) * CATALAN4, rel=1e-12)
    s = 1.3 + 0.4j
    d1 = ShintaniDatum([[1.0]], [0.3], [0.6])
    d2 = ShintaniDatum([[2.0]], [0.3], [0.6])
    ratio = L_completed([s], d2, 0).value / L_completed([s], d1, 0).value
    assert ratio == pytest.approx(2 ** 0.5 * 2 ** -s, rel=1e-12)
    a = L_completed([0.3], BETA, 1).value
    b = L_completed([0.7], BETA, 1).value
    assert abs(a - b) <= 1e-9


def test_R_family_examples():
    d = ShintaniDatum([[1.1, -0.6], [0.4, 1.3]], [0.3, 0.65], [0.2, 0.7])
    s = np.array([0.4 + 0.3j, 0.7 - 0.2j])
    k, l = np.array([1, -2]), np.array([2, 1])
    shifted = ShintaniDatum(d.A, d.x + k, d.y + l)
    chi = ParityType((0, 1))
    a = R_family(s, shifted, chi).value
    b = e_of(float(d.x @ l)) * R_family(s, d, chi).value
    assert abs(a - b) <= 1e-12
    # completed dual relation with the reduced torus point -x
    for chi in ParityType.all(2):
        lhs = L_completed(s, d, chi).value
        rhs = chi.i_chi * R_family(1 - s, ShintaniDatum(d.Astar, d.y, -d.x), chi, completed=True).value
        assert abs(lhs - rhs) <= 1e-8


def test_continue_examples():
    a = continue_L([0.3], BETA, 1).value
    b = L_normalized([0.3], BETA, 1, method=Method.INTEGRAL).value
    assert abs(a - b) <= 1e-9
    with pytest.raises(GammaPole):
        continue_L([-2], BETA, 0)


def test_fe_residual_examples():
    d = ShintaniDatum([[1.1, -0.6], [0.4, 1.3]], [0.3, 0.65], [0.2, 0.7])
    s = [0.35 + 0.5j, 0.6 - 0.4j]
    moved = ShintaniDatum(d.A, d.x + np.array([2, -1]), d.y + np.array([-1, 3]))
    assert fe_residual(s, moved, (1, 0)) <= 1e-8
    diag = ShintaniDatum(np.diag([1.3, 0.8]), [0.3, 0.65], [0.2, 0.7])
    assert fe_residual(s, diag, (0, 1)) <= 1e-9


def test_derivative_examples():
    d = ShintaniDatum([[1.0]], [0.3], [0.25])
    assert derivative_residual([2], d, 1, 0, variable="x") <= 1e-6
    assert derivative_residual([1.5 + 0.3j], d, 0, 0, variable="y") <= 1e-6
    # a diagonal matrix couples only the chosen coordinate
    diag = ShintaniDatum(np.diag([1.3, 0.8]), [0.3, 0.65], [0.2, 0.7])
    assert derivative_residual([1.5, 1.6], diag, (0, 1), 1, variable="x") <= 1e-6


# -- Taylor coefficients ---------------------------------------------------------------

def test_phi_coefficient_examples():
    c = phi_coeffs(0.5, 0.5, 9)
    assert c[0] == pytest.approx(0.5)
    assert np.max(np.abs(c[1::2])) <= 1e-13 * np.max(np.abs(c))
    # 1 / (2 cosh(pi u)) = 1/2 - pi^2 u^2 / 4 + ...
    assert c[2] == pytest.approx(-math.pi ** 2 / 4, rel=1e-14)


def test_bernoulli_examples():
    d = ShintaniDatum([[1.0, 0.4], [-0.5, 2.0]], [0.3, 0.8], [0.15, 0.6])
    b0, _ = bernoulli_B(d, (0, 0))
    assert b0 == pytest.approx(np.prod(1 / (1 - e_of(d.y))), rel=1e-14)
    b2, _ = bernoulli_B(BETA, (2,))
    assert b2 == pytest.approx(-0.125, abs=1e-15)


def test_positive_special_value_examples():
    d = ShintaniDatum([[-1.4]], [0.37], [0.62])
    v, _ = special_value_pos(MultiIndex((2,)), d, 0)
    assert abs(v - L_normalized([2], d, 0, method=Method.INTEGRAL).value) <= 1e-9
    v, _ = special_value_pos(MultiIndex((1, 1)), HALF2, (1, 1))
    assert v == pytest.approx((math.pi / 2) ** 2, rel=1e-14)


def test_beta_at_negative_integers():
    # L_1(s, 1, 1/2, 1/2) = 2^s beta(s), with beta(0) = 1/2 and beta(-2) = -1/2
    for k in (0, 2, 4):
        ref = 2.0 ** -k * float(mp.dirichlet(-k, [0, 1, 0, -1]))
        assert L_normalized([-k], BETA, 1).value == pytest.approx(ref, abs=1e-13)
