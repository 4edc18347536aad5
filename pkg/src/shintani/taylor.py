"""Taylor coefficients of the kernel and the special values they produce.

``F(tA, x, y) = sum_k B_k(A, x, y) (-2 pi t)^k / k!`` defines the
Bernoulli-like numbers ``B_k``.  They give

* ``L_chi(-k) = B_k(A, x, y)`` when ``k = 1 - chi (mod 2)`` and 0 otherwise,
* ``L_chi(k) = |det A|^-1 e(-x.y) B_{k-1}(A*, y, 1-x) (2 pi i)^k / (2^r (k-1)!)``
  for ``k >= 1`` with ``k = chi (mod 2)``.

Series are stored on the graded index set ``{k : |k| <= K}``; products are
truncated at total degree ``K``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import ParityType, ShintaniDatum, _check_noninteger, e_of
from .errors import CapExceeded, ParityMismatch, ShintaniError

MAX_DEGREE = 16
MAX_VARIABLES = 6
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class MultiIndex:
    k: tuple

    def __post_init__(self):
        k = tuple(int(v) for v in self.k)
        if any(v < 0 for v in k):
            raise ShintaniError(f"multi-index entries must be nonnegative: {k}")
        object.__setattr__(self, "k", k)

    @classmethod
    def coerce(cls, k):
        return k if isinstance(k, MultiIndex) else cls(tuple(np.atleast_1d(k)))

    @property
    def r(self):
        return len(self.k)

    @property
    def norm(self):
        """|k| = sum of entries."""
        return sum(self.k)

    @property
    def factorial(self):
        """k! = prod k_nu!."""
        return math.prod(math.factorial(v) for v in self.k)

    def shift(self, mu, by=1):
        k = list(self.k)
        k[mu] += by
        return MultiIndex(tuple(k))

    def __add__(self, other):
        return MultiIndex(tuple(a + b for a, b in zip(self.k, MultiIndex.coerce(other).k)))

    def minus_one(self):
        """k - (1, ..., 1); needs every entry >= 1."""
        if min(self.k) < 1:
            raise ShintaniError(f"k - 1 needs all entries >= 1, got {self.k}")
        return MultiIndex(tuple(v - 1 for v in self.k))

    def parity(self):
        return ParityType(tuple(v % 2 for v in self.k))

    def congruent(self, chi):
        """k = chi (mod 2) entrywise."""
        chi = ParityType.coerce(chi, self.r)
        return self.parity() == chi


@lru_cache(maxsize=64)
def _index_set(r, K):
    """All k with |k| <= K, graded by total degree, plus mixed-radix codes."""
    if r > MAX_VARIABLES or K > MAX_DEGREE:
        raise CapExceeded(f"series caps are r <= {MAX_VARIABLES}, K <= {MAX_DEGREE}; got r={r}, K={K}")
    rows = []

    def rec(prefix, left):
        if len(prefix) == r:
            rows.append(prefix)
            return
        for v in range(left + 1):
            rec(prefix + (v,), left - v)

    rec((), K)
    idx = np.array(rows, dtype=np.int64).reshape(-1, r)
    deg = idx.sum(axis=1)
    order = np.lexsort(tuple(idx[:, ::-1].T) + (deg,))
    idx = idx[order]
    codes = idx @ ((K + 1) ** np.arange(r, dtype=np.int64))
    sort = np.argsort(codes)
    for arr in (idx, codes, sort):
        arr.setflags(write=False)
    return idx, codes, sort


class TruncatedSeries:
    """Power series in r variables truncated at total degree K.

    ``coeffs`` is aligned with the graded index set of ``(r, K)``.
    """

    def __init__(self, r, K, coeffs=None):
        self.r = int(r)
        self.K = int(K)
        self.index, self._codes, self._sort = _index_set(self.r, self.K)
        if coeffs is None:
            coeffs = np.zeros(len(self.index), dtype=complex)
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.shape != (len(self.index),):
            raise ShintaniError(f"expected {len(self.index)} coefficients, got {coeffs.shape}")
        self.coeffs = coeffs

    @classmethod
    def constant(cls, r, K, c=1.0):
        out = cls(r, K)
        out.coeffs[0] = c
        return out

    def _position(self, k):
        k = MultiIndex.coerce(k)
        if k.r != self.r:
            raise ShintaniError(f"multi-index of length {k.r} for a series in {self.r} variables")
        if k.norm > self.K:
            raise CapExceeded(f"|k| = {k.norm} exceeds the truncation degree {self.K}")
        code = sum(v * (self.K + 1) ** i for i, v in enumerate(k.k))
        j = int(np.searchsorted(self._codes[self._sort], code))
        return int(self._sort[j])

    def __getitem__(self, k):
        return complex(self.coeffs[self._position(k)])

    def __setitem__(self, k, value):
        self.coeffs[self._position(k)] = value

    def items(self):
        for k, c in zip(self.index, self.coeffs):
            yield MultiIndex(tuple(k)), complex(c)

    def _check(self, other):
        if not isinstance(other, TruncatedSeries) or (other.r, other.K) != (self.r, self.K):
            raise ShintaniError("series must share the number of variables and the degree cap")

    def __add__(self, other):
        self._check(other)
        return TruncatedSeries(self.r, self.K, self.coeffs + other.coeffs)

    def __mul__(self, other):
        if np.isscalar(other):
            return TruncatedSeries(self.r, self.K, self.coeffs * other)
        self._check(other)
        return TruncatedSeries(self.r, self.K, _truncated_product(self, self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def abs(self):
        return TruncatedSeries(self.r, self.K, np.abs(self.coeffs))

    def __call__(self, t):
        """Evaluate sum c_k t^k at a point t."""
        t = np.atleast_1d(np.asarray(t, dtype=complex))
        powers = np.prod(t[None, :] ** self.index, axis=1)
        return complex(self.coeffs @ powers)

    def degree_part(self, d):
        """Sub-series of total degree exactly d, as coefficient dict."""
        mask = self.index.sum(axis=1) == d
        return {MultiIndex(tuple(k)): complex(c) for k, c in zip(self.index[mask], self.coeffs[mask])}


@lru_cache(maxsize=64)
def _product_plan(r, K):
    """Pairs (i, j, target) with |k_i| + |k_j| <= K, as index arrays."""
    idx, codes, sort = _index_set(r, K)
    deg = idx.sum(axis=1)
    sorted_codes = codes[sort]
    ii, jj, tt = [], [], []
    for d1 in range(K + 1):
        a = np.nonzero(deg == d1)[0]
        b = np.nonzero(deg <= K - d1)[0]
        target = codes[a][:, None] + codes[b][None, :]
        pos = sort[np.searchsorted(sorted_codes, target)]
        ii.append(np.repeat(a, len(b)))
        jj.append(np.tile(b, len(a)))
        tt.append(pos.ravel())
    return np.concatenate(ii), np.concatenate(jj), np.concatenate(tt)


def _truncated_product(series, a, b):
    ii, jj, tt = _product_plan(series.r, series.K)
    out = np.zeros(len(a), dtype=complex)
    np.add.at(out, tt, a[ii] * b[jj])
    return out


# -- kernel coefficients --------------------------------------------------------

def phi_coeffs(x, y, K):
    """Maclaurin coefficients c_0..c_K of phi(u, x, y) in u.

    From (1 - e(y) e^{-2 pi u}) phi = e^{-2 pi u x}:
    c_n (1 - e(y)) = (-2 pi x)^n / n! + e(y) sum_{j=1..n} (-2 pi)^j / j! c_{n-j}.
    """
    _check_noninteger(y, "y")
    K = int(K)
    if K < 0:
        raise ShintaniError("K must be nonnegative")
    z = complex(e_of(float(y)))
    E = [(-2.0 * math.pi) ** j / math.factorial(j) for j in range(K + 1)]
    c = np.zeros(K + 1, dtype=complex)
    for n in range(K + 1):
        acc = (-2.0 * math.pi * x) ** n / math.factorial(n)
        acc += z * sum(E[j] * c[n - j] for j in range(1, n + 1))
        c[n] = acc / (1.0 - z)
    return c


def _linear_form_series(c, column, K):
    """Series of sum_n c_n (t . column)^n in t, truncated at degree K."""
    r = len(column)
    idx, _, _ = _index_set(r, K)
    deg = idx.sum(axis=1)
    fact = np.array([math.prod(math.factorial(int(v)) for v in row) for row in idx], dtype=float)
    multinom = np.array([math.factorial(int(d)) for d in deg], dtype=float) / fact
    mono = np.prod(np.asarray(column, dtype=float)[None, :] ** idx, axis=1)
    return TruncatedSeries(r, K, c[deg] * multinom * mono)


def compose_B(datum, K):
    """Truncated series of F(tA, x, y) in t (total degree <= K).

    The factor for column nu is phi((tA)_nu) with (tA)_nu = sum_mu t_mu a_mu,nu.
    """
    r = datum.r
    if r > MAX_VARIABLES or K > MAX_DEGREE:
        raise CapExceeded(f"series caps are r <= {MAX_VARIABLES}, K <= {MAX_DEGREE}; got r={r}, K={K}")
    out = None
    for nu in range(r):
        c = phi_coeffs(float(datum.x[nu]), float(datum.y[nu]), K)
        f = _linear_form_series(c, datum.A[:, nu], K)
        out = f if out is None else out * f
    return out


def _B_from_series(series, k):
    k = MultiIndex.coerce(k)
    return series[k] * k.factorial / (-2.0 * math.pi) ** k.norm


def bernoulli_B(datum, k, K=None):
    """B_k(A, x, y) with its rounding estimate, as ``(value, err)``."""
    k = MultiIndex.coerce(k)
    if k.r != datum.r:
        raise ShintaniError(f"multi-index of length {k.r} for degree {datum.r}")
    K = k.norm if K is None else int(K)
    if K < k.norm:
        raise CapExceeded(f"taylor order {K} is below |k| = {k.norm}")
    series = compose_B(datum, K)
    value = _B_from_series(series, k)
    # rounding: relative to the same coefficient computed with |.| everywhere
    abs_series = None
    for nu in range(datum.r):
        c = np.abs(phi_coeffs(float(datum.x[nu]), float(datum.y[nu]), K))
        f = _linear_form_series(c, np.abs(datum.A[:, nu]), K)
        abs_series = f if abs_series is None else abs_series * f
    err = 16 * _EPS * (K + 1) * datum.r * abs(_B_from_series(abs_series, k))
    return value, err


def special_value_neg(k, datum, chi, K=None):
    """L_chi(-k): B_k(A, x, y) if k = 1 - chi (mod 2), else exactly 0.

    Returns ``(value, err)``.
    """
    k = MultiIndex.coerce(k)
    chi = ParityType.coerce(chi, datum.r)
    if k.r != datum.r:
        raise ShintaniError(f"multi-index of length {k.r} for degree {datum.r}")
    if not k.congruent(chi.complement()):
        return 0j, 0.0
    return bernoulli_B(datum, k, K)


def special_value_pos(k, datum, chi, K=None):
    """L_chi(k) for k >= 1 with k = chi (mod 2), from B_{k-1}(A*, y, 1-x).

    Returns ``(value, err)``.
    """
    k = MultiIndex.coerce(k)
    chi = ParityType.coerce(chi, datum.r)
    if k.r != datum.r:
        raise ShintaniError(f"multi-index of length {k.r} for degree {datum.r}")
    if not k.congruent(chi):
        raise ParityMismatch(f"positive special values need k = chi (mod 2); k={k.k}, chi={chi.chi}")
    km1 = k.minus_one()
    dual = ShintaniDatum(datum.Astar, datum.y, 1.0 - datum.x)
    b, b_err = bernoulli_B(dual, km1, None if K is None else max(int(K), km1.norm))
    pre = (complex(e_of(-float(datum.x @ datum.y))) / abs(datum.detA)
           * (2j * math.pi) ** k.norm / (2 ** datum.r * km1.factorial))
    return b * pre, b_err * abs(pre)
