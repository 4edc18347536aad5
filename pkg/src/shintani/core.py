"""Building blocks: the character e(z), the kernels phi/F/G, gamma factors,
parity types and the torus reduction used for quasiperiodic extension."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError, GammaPole, ShintaniError, SingularMatrix

TWO_PI = 2.0 * np.pi
INTEGER_GUARD = 1e-9
DEFAULT_MARGIN = 0.05


def e_of(z):
    """exp(2 pi i z); real arguments are reduced mod 1 first."""
    z = np.asarray(z)
    if not np.iscomplexobj(z):
        z = z - np.floor(z)
    out = np.exp(2j * np.pi * z)
    return out[()] if out.ndim == 0 else out


def _check_noninteger(v, name):
    v = np.atleast_1d(np.asarray(v, dtype=float))
    dist = np.abs(v - np.round(v))
    if np.any(dist < INTEGER_GUARD):
        raise DomainError(f"{name} has an entry within {INTEGER_GUARD:g} of an integer: {v}")


def phi(t, x, y):
    """phi(t, x, y) = e(itx) / (1 - e(y + it)), evaluated without overflow.

    ``t`` may be any real or complex array; ``x`` and ``y`` are scalars.
    """
    _check_noninteger(y, "y")
    t = np.asarray(t)
    z = np.exp(2j * np.pi * (y - np.floor(y)))
    neg = np.real(t) < 0
    tt = np.where(neg, -t, t)
    zz = np.where(neg, 1.0 / z, z)
    q = np.exp(-TWO_PI * tt)
    num = np.exp(-TWO_PI * tt * np.where(neg, 1.0 - x, x))
    val = num / (1.0 - zz * q)
    out = np.where(neg, -zz * val, val)
    return out[()] if out.ndim == 0 else out


def F_prod(t, datum):
    """F(tA, x, y) for row vectors ``t`` (last axis of length r)."""
    t = np.asarray(t)
    u = t @ datum.A
    out = np.ones(u.shape[:-1], dtype=complex)
    for nu in range(datum.r):
        out = out * phi(u[..., nu], datum.x[nu], datum.y[nu])
    return out[()] if out.ndim == 0 else out


def G_prod(t, datum):
    """G(tA, x, y) = e(x.y) F(tA, x, y)."""
    return e_of(float(datum.x @ datum.y)) * F_prod(t, datum)


# -- gamma factors ----------------------------------------------------------

def _is_nonpositive_integer(z, tol=1e-12):
    z = complex(z)
    return abs(z.imag) <= tol and z.real <= tol and abs(z.real - round(z.real)) <= tol


def gamma_R(s):
    """pi^(-s/2) Gamma(s/2)."""
    s = complex(s)
    if _is_nonpositive_integer(s / 2):
        raise GammaPole(f"gamma_R has a pole at s={s}")
    return complex(np.pi ** (-s / 2) * special.gamma(s / 2))


def gamma_C(s):
    """2 (2 pi)^(-s) Gamma(s)."""
    s = complex(s)
    if _is_nonpositive_integer(s):
        raise GammaPole(f"gamma_C has a pole at s={s}")
    return complex(2.0 * TWO_PI ** (-s) * special.gamma(s))


def rgamma_C(s):
    """1 / gamma_C(s); entire, exactly zero at the poles of gamma_C."""
    s = complex(s)
    if _is_nonpositive_integer(s):
        return 0j
    return complex(0.5 * TWO_PI ** s * special.rgamma(s))


def gamma_chi(s, chi):
    """prod_nu gamma_R(s_nu + chi(nu)); the offending index is attached on poles."""
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    chi = ParityType.coerce(chi, len(s))
    out = 1.0 + 0j
    for nu, (sv, bit) in enumerate(zip(s, chi.chi)):
        try:
            out *= gamma_R(sv + bit)
        except GammaPole as exc:
            raise GammaPole(f"gamma factor pole in component {nu}: {exc}", index=nu) from None
    return out


# -- small value types ------------------------------------------------------

@dataclass(frozen=True)
class ParityType:
    chi: tuple

    def __post_init__(self):
        chi = tuple(int(b) % 2 for b in self.chi)
        object.__setattr__(self, "chi", chi)

    @classmethod
    def coerce(cls, chi, r=None):
        if isinstance(chi, ParityType):
            p = chi
        elif np.isscalar(chi):
            p = cls((int(chi),) * (1 if r is None else r))
        else:
            p = cls(tuple(chi))
        if r is not None and p.r != r:
            raise ShintaniError(f"parity type has length {p.r}, expected {r}")
        return p

    @classmethod
    def all(cls, r):
        return [cls(bits) for bits in itertools.product((0, 1), repeat=r)]

    @property
    def r(self):
        return len(self.chi)

    @property
    def i_chi(self):
        return 1j ** (sum(self.chi) % 4)

    def complement(self):
        return ParityType(tuple(1 - b for b in self.chi))

    def shift(self, mu):
        """chi + 1_mu in (Z/2)^r."""
        bits = list(self.chi)
        bits[mu] ^= 1
        return ParityType(tuple(bits))

    def gamma(self, s):
        return gamma_chi(s, self)

    def __array__(self, dtype=None, copy=None):
        return np.array(self.chi, dtype=dtype)


@dataclass(frozen=True)
class SignVector:
    sigma: tuple

    @classmethod
    def all(cls, r):
        return [cls(sig) for sig in itertools.product((1, -1), repeat=r)]

    def power(self, bits):
        """prod_nu sigma_nu ** bits_nu."""
        bits = bits.chi if isinstance(bits, ParityType) else bits
        out = 1
        for sg, b in zip(self.sigma, bits):
            if int(b) % 2 and sg < 0:
                out = -out
        return out

    def apply(self, A):
        """Scale row nu of A by sigma_nu."""
        return np.asarray(self.sigma, dtype=float)[:, None] * np.asarray(A, dtype=float)


class Region(str, enum.Enum):
    RIGHT = "RIGHT"
    LEFT = "LEFT"
    STRIP = "STRIP"
    LATTICE = "LATTICE"
    OUTSIDE = "OUTSIDE"


class SpectralPoint:
    """A vector s of complex exponents with its region classification."""

    def __init__(self, s, margin=DEFAULT_MARGIN):
        if isinstance(s, SpectralPoint):
            s = s.s
        self.s = np.atleast_1d(np.asarray(s, dtype=complex)).copy()
        self.s.setflags(write=False)
        self.margin = float(margin)

    @property
    def r(self):
        return len(self.s)

    @property
    def is_right(self):
        return bool(np.all(self.s.real > self.margin))

    @property
    def is_left(self):
        return bool(np.all(1.0 - self.s.real > self.margin))

    @property
    def is_lattice(self):
        return bool(np.all(np.abs(self.s.imag) < 1e-12)
                    and np.all(np.abs(self.s.real - np.round(self.s.real)) < 1e-12))

    @property
    def lattice_point(self):
        if not self.is_lattice:
            return None
        return tuple(int(round(v)) for v in self.s.real)

    @property
    def region(self):
        if self.is_lattice:
            return Region.LATTICE
        if self.is_right and self.is_left:
            return Region.STRIP
        if self.is_right:
            return Region.RIGHT
        if self.is_left:
            return Region.LEFT
        return Region.OUTSIDE

    def reflect(self):
        return SpectralPoint(1.0 - self.s, self.margin)

    def shift(self, mu, by=1):
        s = self.s.copy()
        s[mu] += by
        return SpectralPoint(s, self.margin)

    def __repr__(self):
        return f"SpectralPoint({self.s.tolist()}, region={self.region.value})"


@dataclass(frozen=True)
class EvalResult:
    value: complex
    err: float
    method: str

    METHODS = ("series", "integral", "contour", "reflection", "taylor")

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))
        err = float(self.err)
        if not np.isfinite(err) or err < 0:
            raise ShintaniError(f"invalid error estimate {err}")
        object.__setattr__(self, "err", err)

    def __complex__(self):
        return self.value

    def scaled(self, c, method=None):
        return EvalResult(self.value * c, self.err * abs(c), method or self.method)


class ShintaniDatum:
    """Matrix A (with det and A* = (A^t)^-1 cached) and torus points x, y.

    The torus coordinates may be any non-integer reals; most evaluators
    expect them in the open unit cube and reduce via :func:`reduce_torus`.
    """

    def __init__(self, A, x, y):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = np.atleast_1d(np.asarray(y, dtype=float))
        r = A.shape[0]
        if A.shape != (r, r) or x.shape != (r,) or y.shape != (r,):
            raise ShintaniError(f"inconsistent shapes A{A.shape}, x{x.shape}, y{y.shape}")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ShintaniError("non-finite input")
        _check_noninteger(x, "x")
        _check_noninteger(y, "y")
        det = float(np.linalg.det(A))
        scale = float(np.prod(np.linalg.norm(A, axis=1)))
        if scale == 0.0 or abs(det) <= 1e-13 * scale:
            raise SingularMatrix(f"matrix is singular (det={det:g})")
        Astar = np.linalg.inv(A).T
        for arr in (A, x, y, Astar):
            arr.setflags(write=False)
        self.A, self.x, self.y, self.Astar = A, x, y, Astar
        self.r = r
        self.detA = det

    def __repr__(self):
        return f"ShintaniDatum(A={self.A.tolist()}, x={self.x.tolist()}, y={self.y.tolist()})"

    @property
    def in_unit_cube(self):
        return bool(np.all((self.x > 0) & (self.x < 1) & (self.y > 0) & (self.y < 1)))

    @property
    def is_positive(self):
        return bool(np.all(self.A > 0))

    def with_matrix(self, A):
        return ShintaniDatum(A, self.x, self.y)

    def with_torus(self, x, y):
        return ShintaniDatum(self.A, x, y)

    def dual(self):
        """The reflected datum (A*, y, 1 - x)."""
        return ShintaniDatum(self.Astar, self.y, 1.0 - self.x)

    def signed(self, sigma):
        sigma = sigma if isinstance(sigma, SignVector) else SignVector(tuple(sigma))
        return ShintaniDatum(sigma.apply(self.A), self.x, self.y)


def reduce_torus(x, y):
    """Split x = x0 + kx, y = y0 + ky with x0, y0 in (0,1)^r.

    Returns ``(x0, y0, kx, ky, phase)`` with phase = e(-kx . y), the factor
    relating the quasiperiodic extension at (x, y) to the value at (x0, y0).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    _check_noninteger(x, "x")
    _check_noninteger(y, "y")
    kx = np.floor(x).astype(int)
    ky = np.floor(y).astype(int)
    x0 = x - kx
    y0 = y - ky
    phase = complex(e_of(-float(kx @ y)))
    if np.all(kx == 0):
        phase = 1.0 + 0j
    return x0, y0, kx, ky, phase
