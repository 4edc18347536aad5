import math

import mpmath as mp
import numpy as np
import pytest

from shintani import (
    CapExceeded,
    F_prod,
    MultiIndex,
    ParityMismatch,
    ShintaniDatum,
    ShintaniError,
    TruncatedSeries,
    L_ordinary,
    bernoulli_B,
    special_value_neg,
    special_value_pos,
)
from shintani.taylor import compose_B, phi_coeffs


def kernel_taylor(x, y, K):
    """Taylor coefficients of e^(ux) / (1 - e(y) e^u) about u = 0."""
    with mp.workdps(30):
        lam = mp.expjpi(2 * y)
        return [complex(c) for c in mp.taylor(lambda u: mp.exp(u * x) / (1 - lam * mp.exp(u)), 0, K)]


@pytest.mark.parametrize("x,y", [(0.3, 0.4), (0.9, 0.05), (0.5, 0.5)])
def test_phi_coeffs_match_mpmath(x, y):
    K = 10
    with mp.workdps(30):
        lam = mp.expjpi(2 * y)
        ref = mp.taylor(lambda t: mp.exp(-2 * mp.pi * t * x) / (1 - lam * mp.exp(-2 * mp.pi * t)), 0, K)
    ref = np.array([complex(c) for c in ref])
    got = phi_coeffs(x, y, K)
    # the recurrence cancels down to zero coefficients, so scale by the largest
    assert np.max(np.abs(got - ref)) <= 1e-13 * np.max(np.abs(ref))


def test_degree_one_bernoulli_numbers():
    x, y = 0.3, 0.7
    d = ShintaniDatum([[1.0]], [x], [y])
    ref = kernel_taylor(x, y, 8)
    for k in range(9):
        value, err = bernoulli_B(d, [k])
        assert abs(value - ref[k] * math.factorial(k)) <= max(1e-12, 10 * err)


def test_negative_values_of_lerch_sum():
    x, y = 0.45, 0.3
    d = ShintaniDatum([[1.0]], [x], [y])
    for k in range(5):
        with mp.workdps(25):
            ref = complex(mp.lerchphi(mp.expjpi(2 * y), -k, x))
        assert abs(L_ordinary([-k], d).value - ref) <= 1e-12


def test_B_of_product_matrix_factorises():
    d = ShintaniDatum([[1.5, 0.0], [0.0, -0.8]], [0.3, 0.6], [0.2, 0.45])
    d1 = ShintaniDatum([[1.5]], [0.3], [0.2])
    d2 = ShintaniDatum([[-0.8]], [0.6], [0.45])
    for k in [(0, 0), (1, 2), (3, 1)]:
        b, _ = bernoulli_B(d, k)
        assert b == pytest.approx(bernoulli_B(d1, [k[0]])[0] * bernoulli_B(d2, [k[1]])[0], rel=1e-12)


def test_special_values_parity():
    d = ShintaniDatum([[1.0, 0.5], [-0.3, 1.2]], [0.3, 0.6], [0.2, 0.45])
    value, err = special_value_neg([1, 0], d, (1, 0))
    assert value == 0 and err == 0
    with pytest.raises(ParityMismatch):
        special_value_pos([1, 2], d, (0, 0))
    with pytest.raises(ShintaniError):
        special_value_neg([1], d, (0, 0))


def test_positive_value_degree_one():
    # L_1(1, A=1, 1/2, 1/2) = pi / 2
    d = ShintaniDatum([[1.0]], [0.5], [0.5])
    value, _ = special_value_pos([1], d, 1)
    assert abs(value - math.pi / 2) <= 1e-14


def test_truncated_series_arithmetic():
    a = TruncatedSeries(2, 3)
    a[(0, 0)] = 1.0
    a[(1, 0)] = 2.0
    b = TruncatedSeries(2, 3)
    b[(0, 1)] = 3.0
    b[(0, 0)] = 1.0
    p = a * b
    assert p[(1, 1)] == 6.0
    assert p[(0, 1)] == 3.0
    assert (a + b)[(0, 0)] == 2.0
    assert (2 * a)[(1, 0)] == 4.0
    t = np.array([0.1, -0.2])
    assert p(t) == pytest.approx((1 + 2 * t[0]) * (1 + 3 * t[1]))
    assert {k for k, c in p.degree_part(2).items() if c} == {MultiIndex((1, 1))}
    with pytest.raises(CapExceeded):
        a[(3, 1)]
    with pytest.raises(ShintaniError):
        a + TruncatedSeries(2, 4)


def test_compose_B_evaluates_kernel():
    d = ShintaniDatum([[1.0, 0.5], [-0.3, 1.2]], [0.3, 0.6], [0.2, 0.45])
    series = compose_B(d, 14)
    t = np.array([0.01, -0.02])
    assert series(t) == pytest.approx(F_prod(t, d), rel=1e-12)


def test_multi_index():
    k = MultiIndex((2, 1, 0))
    assert k.norm == 3 and k.factorial == 2
    assert k.shift(2).k == (2, 1, 1)
    assert (k + (1, 1, 1)).k == (3, 2, 1)
    with pytest.raises(ShintaniError):
        k.minus_one()
    with pytest.raises(ShintaniError):
        MultiIndex((-1,))
    assert k.congruent((0, 1, 0))


def test_caps():
    d = ShintaniDatum([[1.0]], [0.3], [0.4])
    with pytest.raises(CapExceeded):
        bernoulli_B(d, [17])
    with pytest.raises(CapExceeded):
        bernoulli_B(d, [3], K=2)
