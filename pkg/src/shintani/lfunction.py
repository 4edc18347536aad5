"""The Shintani L-function family and its analytic continuation.

Normalized values come from the orthant decomposition

    L_chi(s, A, x, y) = 2^-r sum_sigma sigma^(1-chi) L(s, sigma A, x, y),

with ``sigma A`` the matrix whose row nu is scaled by ``sigma_nu``.  On the
left of the critical strip values come from the functional equation

    Lhat_chi(s, A, x, y) = i_chi e(-x.y) Lhat_chi(1 - s, A*, y, 1 - x),
    Lhat_chi = |det A|^(1/2) Gamma_chi(s) L_chi,

and at lattice points from the Taylor coefficients of the kernel.  Torus
points outside the unit cube are reduced first using
``L_chi(s, A, x + k, y + l) = e(-k.y) L_chi(s, A, x, y)``.

Routing of ``s`` (AUTO):

=====================  ========================================
region                 route
=====================  ========================================
nonpositive lattice    Taylor coefficients (``taylor``)
positive lattice,      closed form from the dual coefficients
  ``k = chi mod 2``
RIGHT, STRIP           orthant quadrature (``integral``), loop
                       quadrature (``contour``) at large |Im s|
LEFT                   functional equation (``reflection``)
anything else          ``OutsideRegion``
=====================  ========================================
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np

from . import quadrature, series, taylor
from .core import (
    DEFAULT_MARGIN,
    EvalResult,
    ParityType,
    Region,
    ShintaniDatum,
    SignVector,
    SpectralPoint,
    e_of,
    gamma_chi,
    reduce_torus,
)
from .errors import GammaPole, NonPositiveMatrix, OutsideRegion, RegionError, ShintaniError


class Variant(str, enum.Enum):
    ORDINARY = "ORDINARY"
    NORMALIZED = "NORMALIZED"
    COMPLETED = "COMPLETED"
    R = "R"
    R_COMPLETED = "R_COMPLETED"


class Method(str, enum.Enum):
    AUTO = "auto"
    DIRICHLET = "dirichlet"
    INTEGRAL = "integral"
    CONTOUR = "contour"


@dataclass(frozen=True)
class LConfig:
    """Settings for every evaluator reached from this module.

    ``alt_quad`` is the independent grid used for the second side of
    functional-equation checks; ``taylor_order`` overrides the truncation
    degree of the Taylor route (default: the smallest that works).
    """

    quad: quadrature.QuadConfig = field(default_factory=quadrature.QuadConfig)
    alt_quad: quadrature.QuadConfig = field(
        default_factory=lambda: quadrature.QuadConfig(order=24, coarse_order=16, panel_scale=0.6))
    series: series.SeriesConfig = field(default_factory=series.SeriesConfig)
    margin: float = DEFAULT_MARGIN
    taylor_order: int | None = None
    verify: bool = False
    fd_step: float = 1e-3


@dataclass(frozen=True)
class LRequest:
    datum: ShintaniDatum
    s: SpectralPoint
    chi: ParityType | None = None
    variant: Variant = Variant.NORMALIZED
    method: Method = Method.AUTO

    def __post_init__(self):
        object.__setattr__(self, "s", SpectralPoint(self.s))
        object.__setattr__(self, "variant", Variant(self.variant))
        object.__setattr__(self, "method", Method(self.method))
        if self.s.r != self.datum.r:
            raise ShintaniError(f"s has {self.s.r} components, datum has degree {self.datum.r}")
        if self.variant != Variant.ORDINARY:
            if self.chi is None:
                raise ShintaniError(f"variant {self.variant.value} needs a parity type")
            object.__setattr__(self, "chi", ParityType.coerce(self.chi, self.datum.r))
        if self.method == Method.DIRICHLET and self.variant != Variant.ORDINARY and self.datum.r > 1:
            raise NonPositiveMatrix(
                "normalized values mix sign patterns of A; no Dirichlet series exists for r > 1")


class CrossCheckFailure(ShintaniError):
    """Two evaluation methods disagreed beyond their combined error."""


# -- helpers ---------------------------------------------------------------------

def _reduced(datum):
    """Datum with x, y in (0,1)^r and the phase e(-kx.y) relating the two."""
    if datum.in_unit_cube:
        return datum, 1.0 + 0j
    x0, y0, _, _, phase = reduce_torus(datum.x, datum.y)
    return ShintaniDatum(datum.A, x0, y0), phase


def _sum_results(parts, coeffs, method):
    value = sum(c * p.value for c, p in zip(coeffs, parts))
    err = sum(abs(c) * p.err for c, p in zip(coeffs, parts))
    return EvalResult(value, err, method)


def _ordinary_reduced(s, datum, cfg, method):
    """Ordinary L for x, y already in the unit cube."""
    sp = SpectralPoint(s, cfg.margin)
    s = sp.s
    if method == Method.DIRICHLET:
        return series.dirichlet_L(s, datum, cfg.series)
    if method == Method.INTEGRAL:
        return quadrature.integral_L(s, datum, replace(cfg.quad, margin=cfg.margin))
    if method == Method.CONTOUR:
        return quadrature.hybrid_L(s, datum, replace(cfg.quad, margin=cfg.margin)) \
            if np.any(s.real >= cfg.margin) and np.any(s.real < cfg.margin) \
            else quadrature.contour_L(s, datum, cfg.quad)
    # AUTO
    lat = sp.lattice_point
    if lat is not None and all(k <= 0 for k in lat):
        k = taylor.MultiIndex(tuple(-v for v in lat))
        chi = k.parity().complement()
        value, err = taylor.special_value_neg(k, datum, chi, cfg.taylor_order)
        return EvalResult(value, err, "taylor")
    if np.all(s.real >= cfg.margin):
        out = _retry_on_loop(quadrature.integral_L(s, datum, replace(cfg.quad, margin=cfg.margin)),
                             lambda: quadrature.contour_L(s, datum, cfg.quad))
        if cfg.verify and datum.is_positive and np.sum(s.real) > datum.r + series.ABSCISSA_MARGIN:
            ref = series.dirichlet_L(s, datum, cfg.series)
            _cross_check(out, ref)
        return out
    return quadrature.hybrid_L(s, datum, replace(cfg.quad, margin=cfg.margin))


def _cross_check(a, b, floor=1e-9):
    if abs(a.value - b.value) > max(10 * (a.err + b.err), floor):
        raise CrossCheckFailure(
            f"{a.method} gives {a.value}, {b.method} gives {b.value} (errors {a.err:.1e}, {b.err:.1e})")


def orthant_values(s, datum, cfg, method=Method.INTEGRAL, quad=None):
    """L(s, sigma A, x, y) for every sign vector sigma (datum in the unit cube)."""
    quad = quad or cfg.quad
    quad = replace(quad, margin=cfg.margin)
    out = {}
    for sigma in SignVector.all(datum.r):
        sd = datum.signed(sigma)
        if method == Method.CONTOUR:
            sv = SpectralPoint(s, cfg.margin).s
            if np.any(sv.real >= cfg.margin) and np.any(sv.real < cfg.margin):
                out[sigma] = quadrature.hybrid_L(sv, sd, quad)
            else:
                out[sigma] = quadrature.contour_L(sv, sd, quad)
        else:
            out[sigma] = quadrature.integral_L(s, sd, quad)
    return out


def combine_parity(values, chi):
    """2^-r sum_sigma sigma^(1-chi) L(s, sigma A) from precomputed orthant values."""
    chi = ParityType.coerce(chi, len(next(iter(values)).sigma))
    r = chi.r
    comp = chi.complement()
    sig = list(values)
    coeffs = [sg.power(comp) / 2 ** r for sg in sig]
    method = next(iter(values.values())).method
    return _sum_results([values[sg] for sg in sig], coeffs, method)


def _direct_normalized(s, datum, chi, cfg, method=Method.INTEGRAL, quad=None):
    return combine_parity(orthant_values(s, datum, cfg, method, quad), chi)


# relative error estimate above which an orthant result is retried on the loop
LOOP_RETRY = 1e-10


def _poor(res):
    return res.err > LOOP_RETRY * max(1.0, abs(res.value))


def _retry_on_loop(first, loop):
    """Keep ``first`` unless its estimate is poor and ``loop()`` does better.

    The orthant integral is of size |Gamma(s)| ~ exp(-pi |Im s| / 2) while
    its integrand is of order one, so cancellation costs digits once
    |Im s| exceeds about 3.  The loop integral does not have this problem.
    """
    if not _poor(first):
        return first
    try:
        alt = loop()
    except ShintaniError:
        return first
    return alt if alt.err < first.err else first


def _orthant_or_loop(s, datum, chi, cfg, quad=None):
    return _retry_on_loop(_direct_normalized(s, datum, chi, cfg, quad=quad),
                          lambda: _direct_normalized(s, datum, chi, cfg, Method.CONTOUR, quad))


def _reflect(s, datum, chi, cfg, quad=None):
    """L_chi(s) from Lhat_chi(1 - s) on the dual datum; datum in the unit cube."""
    sp = SpectralPoint(s, cfg.margin)
    chi = ParityType.coerce(chi, datum.r)
    gam = gamma_chi(sp.s, chi)                 # poles reported with their index
    dual = datum.dual()
    right = _orthant_or_loop(1.0 - sp.s, dual, chi, cfg, quad)
    g_right = gamma_chi(1.0 - sp.s, chi)
    hat_right = right.scaled(abs(dual.detA) ** 0.5 * g_right)
    c = chi.i_chi * complex(e_of(-float(datum.x @ datum.y))) / (abs(datum.detA) ** 0.5 * gam)
    return hat_right.scaled(c, "reflection")


def _taylor_value(lat, datum, chi, cfg):
    """Lattice routes; returns None when neither special-value formula applies."""
    if all(k <= 0 for k in lat):
        k = taylor.MultiIndex(tuple(-v for v in lat))
        value, err = taylor.special_value_neg(k, datum, chi, cfg.taylor_order)
        return EvalResult(value, err, "taylor")
    if all(k >= 1 for k in lat):
        k = taylor.MultiIndex(lat)
        if k.congruent(chi):
            value, err = taylor.special_value_pos(k, datum, chi, cfg.taylor_order)
            return EvalResult(value, err, "taylor")
    return None


def _normalized_reduced(s, datum, chi, cfg, method):
    sp = SpectralPoint(s, cfg.margin)
    if method == Method.INTEGRAL:
        if not sp.is_right:
            raise RegionError(f"orthant quadrature needs every Re s_nu > {cfg.margin}: {sp}")
        return _direct_normalized(sp.s, datum, chi, cfg)
    if method == Method.CONTOUR:
        return _direct_normalized(sp.s, datum, chi, cfg, Method.CONTOUR)
    if method == Method.DIRICHLET:
        # degree one only (checked by the request): the bilateral series
        return series.bilateral_r1(complex(sp.s[0]), float(datum.A[0, 0]), float(datum.x[0]),
                                   float(datum.y[0]), chi.chi[0], cfg.series)
    region = sp.region
    if region == Region.LATTICE:
        out = _taylor_value(sp.lattice_point, datum, chi, cfg)
        if out is not None:
            return out
        region = Region.RIGHT if sp.is_right else (Region.LEFT if sp.is_left else Region.OUTSIDE)
    if region in (Region.RIGHT, Region.STRIP):
        return _orthant_or_loop(sp.s, datum, chi, cfg)
    if region == Region.LEFT:
        try:
            return _reflect(sp.s, datum, chi, cfg)
        except GammaPole:
            # Gamma_chi(s) is infinite here; the loop integral has no such pole
            return _direct_normalized(sp.s, datum, chi, cfg, Method.CONTOUR)
    raise OutsideRegion(f"no evaluation route for {sp} (mixed half-planes)")


# -- public operations -------------------------------------------------------------

def L_ordinary(s, datum, cfg=None, method=Method.AUTO):
    """L(s, A, x, y) routed between series, orthant and loop quadrature."""
    cfg = cfg or LConfig()
    red, phase = _reduced(datum)
    return _ordinary_reduced(s, red, cfg, Method(method)).scaled(phase)


def L_normalized(s, datum, chi, cfg=None, method=Method.AUTO):
    """L_chi(s, A, x, y) = 2^-r sum_sigma sigma^(1-chi) L(s, sigma A, x, y)."""
    cfg = cfg or LConfig()
    chi = ParityType.coerce(chi, datum.r)
    red, phase = _reduced(datum)
    return _normalized_reduced(s, red, chi, cfg, Method(method)).scaled(phase)


def L_completed(s, datum, chi, cfg=None, method=Method.AUTO):
    """|det A|^(1/2) Gamma_chi(s) L_chi(s, A, x, y)."""
    cfg = cfg or LConfig()
    chi = ParityType.coerce(chi, datum.r)
    g = gamma_chi(SpectralPoint(s).s, chi)
    return L_normalized(s, datum, chi, cfg, method).scaled(abs(datum.detA) ** 0.5 * g)


def R_family(s, datum, chi, cfg=None, completed=False, method=Method.AUTO):
    """R_chi = e(x.y) L_chi; with ``completed`` the same factor |det A|^(1/2) Gamma_chi(s)
    as for the completed L-function is applied."""
    cfg = cfg or LConfig()
    phase = complex(e_of(float(datum.x @ datum.y)))
    base = L_completed if completed else L_normalized
    return base(s, datum, chi, cfg, method).scaled(phase)


def continue_L(s, datum, chi, cfg=None, quad=None):
    """L_chi(s) for s in the left region through the functional equation.

    The right-hand side Lhat_chi(1 - s, A*, y, 1 - x) is computed by orthant
    quadrature, or by the loop integral when that is more accurate; poles of Gamma_chi at s or 1 - s raise :class:`GammaPole`.
    """
    cfg = cfg or LConfig()
    sp = SpectralPoint(s, cfg.margin)
    if not sp.is_left:
        raise OutsideRegion(f"reflection needs every Re(1 - s_nu) > {cfg.margin}: {sp}")
    chi = ParityType.coerce(chi, datum.r)
    red, phase = _reduced(datum)
    return _reflect(sp.s, red, chi, cfg, quad).scaled(phase)


def evaluate(request, cfg=None):
    """Evaluate an :class:`LRequest`."""
    cfg = cfg or LConfig()
    v = request.variant
    if v == Variant.ORDINARY:
        return L_ordinary(request.s.s, request.datum, cfg, request.method)
    if v == Variant.NORMALIZED:
        return L_normalized(request.s.s, request.datum, request.chi, cfg, request.method)
    if v == Variant.COMPLETED:
        return L_completed(request.s.s, request.datum, request.chi, cfg, request.method)
    return R_family(request.s.s, request.datum, request.chi, cfg,
                    completed=(v == Variant.R_COMPLETED), method=request.method)


# -- residual checkers -------------------------------------------------------------

def _completed_independent(s, datum, chi, cfg, quad):
    """Lhat_chi by orthant or loop quadrature only (never by reflection)."""
    red, phase = _reduced(datum)
    sp = SpectralPoint(s, cfg.margin)
    method = Method.INTEGRAL if sp.is_right else Method.CONTOUR
    val = _direct_normalized(sp.s, red, chi, cfg, method, quad)
    return val.scaled(phase * abs(datum.detA) ** 0.5 * gamma_chi(sp.s, chi))


@dataclass(frozen=True)
class Residual:
    lhs: EvalResult
    rhs: EvalResult

    @property
    def value(self):
        return abs(self.lhs.value - self.rhs.value)

    @property
    def err(self):
        return self.lhs.err + self.rhs.err


def fe_check(s, datum, chi, cfg=None):
    """Both sides of Lhat_chi(s, A, x, y) = i_chi e(-x.y) Lhat_chi(1-s, A*, y, 1-x).

    The sides use different quadrature grids (``cfg.quad`` and
    ``cfg.alt_quad``).
    """
    cfg = cfg or LConfig()
    chi = ParityType.coerce(chi, datum.r)
    sp = SpectralPoint(s, cfg.margin)
    lhs = _completed_independent(sp.s, datum, chi, cfg, cfg.quad)
    dual = ShintaniDatum(datum.Astar, datum.y, 1.0 - datum.x)
    rhs = _completed_independent(1.0 - sp.s, dual, chi, cfg, cfg.alt_quad)
    c = chi.i_chi * complex(e_of(-float(datum.x @ datum.y)))
    return Residual(lhs, rhs.scaled(c))


def fe_residual(s, datum, chi, cfg=None):
    """|Lhat_chi(s, A, x, y) - i_chi e(-x.y) Lhat_chi(1-s, A*, y, 1-x)|."""
    return fe_check(s, datum, chi, cfg).value


def fd_step(coord, base=1e-3):
    """Step for the five-point stencil in one torus coordinate.

    L_chi behaves like dist^(-s) as the coordinate approaches an integer, so
    the stencil's h^4 f^(5) / 30 term grows like (h / dist)^4; ``base`` is
    used at distance >= 0.3 and the step shrinks quadratically below that.
    """
    dist = abs(coord - np.round(coord))
    return base * min(1.0, (dist / 0.3) ** 2)


def _fd5(f, h):
    """Five-point central difference of f at 0."""
    return (f(-2 * h) - 8 * f(-h) + 8 * f(h) - f(2 * h)) / (12 * h)


FD_HALVINGS = 5


def adaptive_fd5(f, h):
    """Five-point difference with the step halved while truncation dominates.

    ``f(dx)`` returns an :class:`EvalResult`.  The truncation error of the
    stencil at h/2 is estimated as |D(h) - D(h/2)| / 15 (it scales like h^4)
    and the rounding error as 1.5 max|err| / h.  Returns the difference at
    the final step and the sum of both estimates.
    """
    errs = []

    def g(dx):
        res = f(dx)
        errs.append(res.err)
        return res.value

    coarse = _fd5(g, h)
    for _ in range(FD_HALVINGS):
        fine = _fd5(g, h / 2)
        trunc = abs(fine - coarse) / 15.0
        h /= 2
        rounding = 18.0 / (12.0 * h) * max(errs)
        coarse = fine
        if trunc <= rounding:
            break
    return coarse, trunc + rounding


def derivative_check(s, datum, chi, direction, cfg=None, variable="x"):
    """Finite-difference derivative against the parity-shifting relations.

    ``variable="x"``: d/dx_nu L_chi(s) = -sum_mu a_{mu nu} s_mu L_{chi+1_mu}(s + 1_mu).
    ``variable="y"``: d/dy_nu R_chi(s) = 2 pi i sum_mu a*_{mu nu} R_{chi+1_mu}(s - 1_mu).
    Returns a :class:`Residual` (finite difference, right-hand side).
    """
    cfg = cfg or LConfig()
    chi = ParityType.coerce(chi, datum.r)
    sp = SpectralPoint(s, cfg.margin)
    nu = int(direction)
    if not 0 <= nu < datum.r:
        raise ShintaniError(f"direction {nu} out of range for degree {datum.r}")
    coord = (datum.x if variable == "x" else datum.y)[nu]
    h = fd_step(coord, cfg.fd_step)
    unit = np.zeros(datum.r)
    unit[nu] = 1.0
    A = datum.A

    if variable == "x":
        def f(dx):
            return L_normalized(sp.s, datum.with_torus(datum.x + dx * unit, datum.y), chi, cfg)
        terms = []
        coeffs = []
        for mu in range(datum.r):
            if A[mu, nu] == 0:
                continue
            terms.append(L_normalized(sp.shift(mu).s, datum, chi.shift(mu), cfg))
            coeffs.append(-A[mu, nu] * sp.s[mu])
    elif variable == "y":
        def f(dy):
            return R_family(sp.s, datum.with_torus(datum.x, datum.y + dy * unit), chi, cfg)
        terms = []
        coeffs = []
        for mu in range(datum.r):
            if datum.Astar[mu, nu] == 0:
                continue
            terms.append(R_family(sp.shift(mu, -1).s, datum, chi.shift(mu), cfg))
            coeffs.append(2j * np.pi * datum.Astar[mu, nu])
    else:
        raise ShintaniError(f"variable must be 'x' or 'y', got {variable!r}")
    rhs = _sum_results(terms, coeffs, terms[0].method if terms else "integral")
    fd, fd_err = adaptive_fd5(f, h)
    return Residual(EvalResult(fd, fd_err, "integral"), rhs)


def derivative_residual(s, datum, chi, direction, cfg=None, variable="x"):
    """|finite difference - right-hand combination| for one relation."""
    return derivative_check(s, datum, chi, direction, cfg, variable).value
