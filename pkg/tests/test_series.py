import mpmath as mp
import numpy as np
import pytest

from shintani import (
    NonPositiveMatrix,
    RegionError,
    SeriesConfig,
    ShintaniDatum,
    ShintaniError,
    TruncationFailure,
    ZeroMatrix,
    bilateral_r1,
    dirichlet_L,
    integral_L,
    lerch_sum,
)
from shintani.series import tail_bound


def lerch_reference(s, x, y):
    with mp.workdps(25):
        return complex(mp.lerchphi(mp.expjpi(2 * y), s, x))


@pytest.mark.parametrize("s", [1.3, 2.0, 1.7 + 0.4j, 3.5 - 2j, 1.15 + 6j])
@pytest.mark.parametrize("x,y", [(0.45, 0.3), (0.05, 0.93), (0.8, 0.5)])
def test_lerch_sum_matches_mpmath(s, x, y):
    got = lerch_sum(s, x, y)
    ref = lerch_reference(s, x, y)
    scale = max(1.0, abs(ref))
    assert abs(got.value - ref) <= min(got.err, 1e-12 * scale)
    # the bound is conservative near y = 1, where the tail weights grow
    assert got.err <= 2e-11 * scale
    assert got.method == "series"


def test_degree_two_series_matches_integral():
    d = ShintaniDatum([[1.3, 0.4], [0.6, 0.7]], [0.3, 0.6], [0.2, 0.45])
    s = np.array([1.8 + 0.5j, 2.1 - 0.3j])
    got = dirichlet_L(s, d)
    assert abs(got.value - integral_L(s, d).value) <= 1e-11


def test_tail_bound_decreases_with_box():
    d = ShintaniDatum([[1.0, 0.5], [0.4, 1.2]], [0.3, 0.6], [0.2, 0.45])
    s = np.array([1.6, 1.5])
    bounds = [tail_bound(d, s, M) for M in (4, 16, 64, 256)]
    assert all(b1 > b2 for b1, b2 in zip(bounds, bounds[1:]))
    assert tail_bound(d, s, 64, order=3) < tail_bound(d, s, 64)
    assert tail_bound(d, [0.9, 0.9], 100) == np.inf


def test_tail_bound_really_bounds_the_remainder():
    x, y, s = 0.4, 0.3, 2.2
    d = ShintaniDatum([[1.0]], [x], [y])
    M = 20
    with mp.workdps(25):
        rest = abs(complex(mp.expjpi(2 * y * M) * mp.lerchphi(mp.expjpi(2 * y), s, x + M)))
    assert rest <= tail_bound(d, [s], M)


def test_bilateral_against_direct_sum():
    a, x, y, s, chi = -1.3, 0.35, 0.6, 1.8 + 0.5j, 1
    with mp.workdps(25):
        term = lambda m: (mp.expjpi(2 * m * y) * mp.sign(a * (x + m)) ** chi
                          * abs(a * (x + m)) ** (-mp.mpc(s)))
        ref = complex(0.5 * mp.sign(a) * mp.nsum(term, [-mp.inf, mp.inf]))
    got = bilateral_r1(s, a, x, y, chi)
    assert abs(got.value - ref) <= 1e-12


def test_errors():
    mixed = ShintaniDatum([[1.0, -0.5], [0.4, 1.2]], [0.3, 0.6], [0.2, 0.45])
    with pytest.raises(NonPositiveMatrix):
        dirichlet_L([2.0, 2.0], mixed)
    pos = ShintaniDatum([[1.0]], [0.3], [0.4])
    with pytest.raises(RegionError):
        dirichlet_L([1.05], pos)
    with pytest.raises(ShintaniError):
        dirichlet_L([2.0, 2.0], pos)
    with pytest.raises(TruncationFailure):
        dirichlet_L([1.11], ShintaniDatum([[1.0]], [0.3], [1e-9]), SeriesConfig(tol=1e-15, max_box=8))
    with pytest.raises(ZeroMatrix):
        bilateral_r1(2.0, 0.0, 0.3, 0.4, 0)
    with pytest.raises(RegionError):
        bilateral_r1(1.0, 1.0, 0.3, 0.4, 0)
    with pytest.raises(ShintaniError):
        SeriesConfig(tol=1e-17)
