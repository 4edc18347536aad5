"""Direct summation of the defining Dirichlet series.

For a positive matrix ``A`` the Shintani L-function is the lattice sum

    L(s, A, x, y) = sum_{m >= 0} e(m.y) prod_nu (A(x + m))_nu^(-s_nu).

Plain box truncation converges like ``M^(r - Re sum s)``, far too slowly for
the default tolerance near the abscissa.  Each dimension is therefore summed
as a head ``m_j < M`` plus an Euler (summation-by-parts) tail

    sum_{m >= M} z^m g(m) = sum_{k < K} (z/(1-z))^k z^M Delta^k g(M) / (1-z)
                            + (z/(1-z))^K sum_{m >= M} z^m Delta^K g(m),

with ``z = e(y_j)`` and forward differences ``Delta``.  Head and tail
together are a linear functional on the values ``g(0), ..., g(M+K-1)``, so
the full sum is a tensor contraction of ``g`` on the grid
``{0..M+K-1}^r``.  :func:`tail_bound` bounds the neglected remainder
rigorously; ``K = 0`` reduces to plain truncation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .core import EvalResult, ShintaniDatum, SpectralPoint, e_of
from .errors import NonPositiveMatrix, RegionError, ShintaniError, TruncationFailure, ZeroMatrix

ABSCISSA_MARGIN = 0.1
BILATERAL_MARGIN = 1.1
MAX_ORDER = 24
_DEFAULT_BOX = {1: 10**6, 2: 4000, 3: 300}
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class SeriesConfig:
    """``tol`` is the absolute target; ``max_box`` caps the box side (None: by degree)."""

    tol: float = 1e-12
    max_box: int | None = None

    def __post_init__(self):
        if not self.tol >= 1e-15:
            raise ShintaniError("tol must be at least 1e-15")
        if self.max_box is not None and self.max_box < 8:
            raise ShintaniError("max_box must be at least 8")

    def box_cap(self, r):
        if self.max_box is not None:
            return self.max_box
        return _DEFAULT_BOX.get(r, 100)


def _rising_abs(s_abs, k):
    """(|s|)_k as a float."""
    return math.exp(special.gammaln(s_abs + k) - special.gammaln(s_abs))


def _check_positive(datum):
    if not np.all(datum.A > 0):
        raise NonPositiveMatrix("the Dirichlet series needs a matrix with positive entries")
    if not datum.in_unit_cube:
        raise ShintaniError("the Dirichlet series needs x, y in (0,1)^r")


def _tail_factors(y, K):
    """1/|1 - e(y_j)| and the constants C_j bounding the head+tail functional."""
    inv = 1.0 / np.abs(1.0 - e_of(np.asarray(y, dtype=float)))
    C = np.array([sum((2.0 * q) ** k * q for k in range(K)) for q in np.atleast_1d(inv)])
    return np.atleast_1d(inv), C


def tail_bound(datum, s, M, order=0):
    """Upper bound on what the box-[0, M)^r sum with Euler order ``order`` misses.

    ``s`` may be the real parts (plain truncation) or the complex exponents;
    ``order > 0`` needs the latter through the factor (|s|_1)_order.  Uses
    (A(x+m))_nu >= a_min * sum(x + m) and a Hurwitz zeta sum over shells.
    """
    _check_positive(datum)
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    r = datum.r
    K = int(order)
    M = int(M)
    if M < max(r - 1, 1):
        return math.inf
    sigma = float(np.sum(s.real))
    p = sigma + K - r + 1
    if p <= 1:
        return math.inf
    a_min = float(np.min(datum.A))
    a_max = float(np.max(datum.A))
    X = float(np.sum(datum.x))
    shell = float(special.zeta(p, X + M)) / math.factorial(r - 1)
    base = a_min ** (-sigma) * shell
    if K == 0:
        return r * base
    inv, C = _tail_factors(datum.y, K)
    growth = _rising_abs(float(np.sum(np.abs(s))), K) * (a_max / a_min) ** K
    total = 0.0
    prefix = 1.0
    for j in range(r):
        total += prefix * inv[j] ** K * growth * base
        prefix *= 1.0 + C[j]
    return total


def _weights(z, M, K):
    """Head + Euler-tail weights on g(0..M+K-1) for sum_{m >= 0} z^m g(m)."""
    w = np.zeros(M + K, dtype=complex)
    w[:M] = z ** np.arange(M)
    q = z / (1.0 - z)
    lead = z ** M / (1.0 - z)
    for k in range(K):
        ck = lead * q ** k
        i = np.arange(k + 1)
        w[M:M + k + 1] += ck * (-1.0) ** (k - i) * special.comb(k, i)
    return w


def _plan(datum, s, cfg):
    """Cheapest (M, K) whose remainder bound and rounding stay under tol."""
    r = datum.r
    cap = cfg.box_cap(r)
    inv, _ = _tail_factors(datum.y, 1)
    best = None
    for K in range(0, MAX_ORDER + 1):
        # rounding in the difference stencils grows like (2/|1-z|)^K; the
        # reported error carries it through the absolute sum
        if K and float(np.max(2.0 * inv)) ** K > 1e6:
            break
        if tail_bound(datum, s, cap, K) > 0.5 * cfg.tol:
            continue
        lo, hi = max(r - 1, 1), cap
        while lo < hi:
            mid = (lo + hi) // 2
            if tail_bound(datum, s, mid, K) <= 0.5 * cfg.tol:
                hi = mid
            else:
                lo = mid + 1
        cost = (lo + K) ** r
        if best is None or cost < best[0]:
            best = (cost, lo, K)
    if best is None:
        raise TruncationFailure(
            f"no box side <= {cap} brings the tail under {cfg.tol:g} at s={s}")
    return best[1], best[2]


def _contract(datum, s, weights, n):
    """sum over {0..n-1}^r of prod_j weights[j][m_j] * g(m), plus the abs sum."""
    A, x = datum.A, datum.x
    r = datum.r
    grid = np.arange(n, dtype=float)
    if r == 1:
        ell = A[0, 0] * (x[0] + grid)
        g = np.exp(-s[0] * np.log(ell))
        return complex(weights[0] @ g), float(np.abs(weights[0]) @ np.abs(g))
    # loop over the first index, contract the rest
    rest = np.stack(np.meshgrid(*([grid] * (r - 1)), indexing="ij"), axis=-1).reshape(-1, r - 1)
    rest_w = weights[1]
    for w in weights[2:]:
        rest_w = np.multiply.outer(rest_w, w)
    rest_w = rest_w.ravel()
    base = (rest + x[1:]) @ A[:, 1:].T          # contribution of m_2..m_r to each ell_nu
    total = 0j
    abs_total = 0.0
    for i0 in range(n):
        ell = base + A[:, 0] * (x[0] + i0)
        g = np.exp(-np.log(ell) @ s)
        total += weights[0][i0] * (rest_w @ g)
        abs_total += abs(weights[0][i0]) * float(np.abs(rest_w) @ np.abs(g))
    return complex(total), float(abs_total)


def dirichlet_L(s, datum, cfg=None):
    """Sum of the defining series for positive ``A`` and Re sum s > r + 0.1."""
    cfg = cfg or SeriesConfig()
    s = SpectralPoint(s).s
    if len(s) != datum.r:
        raise ShintaniError(f"s has {len(s)} components, datum has degree {datum.r}")
    _check_positive(datum)
    if float(np.sum(s.real)) <= datum.r + ABSCISSA_MARGIN:
        raise RegionError(
            f"the series needs Re sum s > {datum.r + ABSCISSA_MARGIN:g}, got {np.sum(s.real):g}")
    M, K = _plan(datum, s, cfg)
    weights = [_weights(complex(e_of(yj)), M, K) for yj in datum.y]
    value, abs_sum = _contract(datum, s, weights, M + K)
    err = tail_bound(datum, s, M, K) + 8 * _EPS * max(M + K, 16) * abs_sum
    return EvalResult(value, err, "series")


def lerch_sum(s, x, y, cfg=None):
    """sum_{n >= 0} e(ny) (x + n)^(-s) for x, y in (0,1) and Re s > 1.1."""
    return dirichlet_L([s], ShintaniDatum([[1.0]], [x], [y]), cfg)


def bilateral_r1(s, a, x, y, chi, cfg=None):
    """(sgn a)/2 * sum_{m in Z} e(my) sgn(a(x+m))^chi |a(x+m)|^(-s), degree one.

    The sum is split into m >= 0 and m < 0 (m = -1 - n), each an
    accelerated one-sided Lerch sum.
    """
    cfg = cfg or SeriesConfig()
    s = complex(s)
    if a == 0:
        raise ZeroMatrix("the one-dimensional matrix is zero")
    if s.real <= BILATERAL_MARGIN:
        raise RegionError(f"the bilateral series needs Re s > {BILATERAL_MARGIN}, got {s}")
    if not (0 < x < 1 and 0 < y < 1):
        raise ShintaniError("bilateral_r1 needs x, y in (0,1)")
    sg = 1.0 if a > 0 else -1.0
    chi = int(chi) % 2
    half = SeriesConfig(tol=max(cfg.tol / 2, 1e-15), max_box=cfg.max_box)
    up = lerch_sum(s, x, y, half)
    down = lerch_sum(s, 1.0 - x, 1.0 - y, half)
    scale = np.exp(-s * np.log(abs(a)))
    c_up = sg ** chi
    c_down = (-sg) ** chi * complex(e_of(-y))
    value = 0.5 * sg * scale * (c_up * up.value + c_down * down.value)
    err = 0.5 * abs(scale) * (up.err + down.err)
    return EvalResult(value, err, "series")
