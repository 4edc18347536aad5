"""Integral evaluators for the Shintani L-function.

Three integrals are evaluated here:

* the orthant representation ``L = 2^r / prod Gamma_C(s) int_{t>0} F(tA,x,y) t^s dt/t``,
* the loop (Hankel-type) representation, valid for every ``s`` whose
  components avoid the positive integers,
* the real-line Fourier transform of ``F(tA, x, y)``.

All three are tensor products of one-dimensional rules.  A one-dimensional
rule is a list of nodes ``t`` and complex weights such that
``sum w_j f(t_j)`` approximates the relevant functional of ``f``; the
``s``-dependent factors ``t^s``, the Jacobians and the gamma prefactors live
in the weights, so the multidimensional sum only ever evaluates ``F``.

Orthant rule in one variable (for Re s >= margin):

* ``(0, rho]``: ``t = rho e^{-v}``, composite Gauss-Legendre in ``v`` over
  ``[0, V]`` plus one node at ``t = 0`` that carries the exact tail
  ``rho^s e^{-sV} / s``;
* ``[rho, T]``: composite Gauss-Legendre whose panels grow geometrically away
  from the branch point at 0 and are capped by the distance from the real
  axis to the nearest pole of the kernel.

Loop rule: the same ray panels (weighted by ``(e(s) - 1)``, folded into the
prefactor) plus a Gauss-Legendre rule on the circle ``|t| = rho``.

The radius ``rho`` keeps every linear form ``(tA)_nu`` inside the pole-free
disc of the kernel whenever all ``|t_mu| <= rho``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy import optimize, special

from .core import (
    DEFAULT_MARGIN,
    TWO_PI,
    EvalResult,
    ShintaniDatum,
    SignVector,
    SpectralPoint,
    e_of,
    F_prod,
)
from .errors import (
    PoleClearanceError,
    PrefactorPole,
    QuadratureFailure,
    RegionError,
    ShintaniError,
)

MAX_DEGREE = 3


@dataclass(frozen=True)
class QuadConfig:
    """Resolution knobs shared by all integral evaluators.

    ``order``        Gauss-Legendre nodes per panel.
    ``panel_scale``  panel half-width as a fraction of the distance from the
                     real axis to the nearest kernel pole.
    ``cutoff``       integrand magnitude (relative to its peak) below which
                     the domain is truncated.
    ``contour_radius``  radius of the small circle; ``None`` selects AUTO.
    ``fourier_step``    trapezoid step for the Fourier transform; ``None``
                        selects it from the pole distance.
    """

    order: int = 20
    coarse_order: int = 13
    panel_scale: float = 0.75
    cutoff: float = 1e-18
    max_nodes_per_dim: int = 20000
    contour_radius: float | None = None
    near_depth: float = 36.0
    margin: float = DEFAULT_MARGIN
    estimate_error: bool = True
    fourier_step: float | None = None

    def __post_init__(self):
        if self.order < 4 or self.coarse_order < 4:
            raise ShintaniError("Gauss-Legendre order must be at least 4")
        if not 0 < self.panel_scale <= 1:
            raise ShintaniError("panel_scale must lie in (0, 1]")
        if not 0 < self.cutoff <= 1e-12:
            raise ShintaniError("cutoff must lie in (0, 1e-12]")
        if self.contour_radius is not None and self.contour_radius <= 0:
            raise ShintaniError("contour_radius must be positive")

    def coarse(self):
        return replace(self, order=self.coarse_order)


@lru_cache(maxsize=None)
def _gauss_legendre(n):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _panels_gl(edges, n):
    """Composite Gauss-Legendre nodes/weights for consecutive panel edges."""
    edges = np.asarray(edges, dtype=float)
    x, w = _gauss_legendre(n)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


# -- geometry of the integrand ----------------------------------------------

def _pole_gap(y):
    """Distance from 0 to the nearest pole i(y - n) of phi(., x, y)."""
    y = np.asarray(y) - np.floor(y)
    return np.minimum(y, 1.0 - y)


def auto_radius(datum):
    """AUTO circle radius: 0.5 * min gap / (r * max |a|)."""
    return 0.5 * float(np.min(_pole_gap(datum.y))) / (datum.r * float(np.max(np.abs(datum.A))))


def _check_clearance(datum, rho):
    reach = rho * np.sum(np.abs(datum.A), axis=0)
    if np.any(reach >= _pole_gap(datum.y)):
        raise PoleClearanceError(
            f"contour radius {rho:g} reaches a kernel pole (reach {reach}, gaps {_pole_gap(datum.y)})")


@dataclass
class _Geometry:
    rho: float
    box: np.ndarray      # |(tA)_nu| <= box_nu keeps everything above the cutoff
    reach: np.ndarray    # per-variable truncation point T_mu
    hcap: np.ndarray     # per-variable cap on the panel half-width


def _orthant_reach(A, box):
    """max t_mu over {t >= 0, |tA| <= box}, one small linear program per mu."""
    r = A.shape[0]
    fallback = np.abs(np.linalg.inv(A)).T @ box
    A_ub = np.vstack([A.T, -A.T])
    b_ub = np.concatenate([box, box])
    out = np.empty(r)
    for mu in range(r):
        c = np.zeros(r)
        c[mu] = -1.0
        res = optimize.linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=[(0, None)] * r, method="highs")
        out[mu] = min(-res.fun * (1 + 1e-9), fallback[mu]) if res.status == 0 else fallback[mu]
    return out


def _geometry(datum, cfg, s, hankel):
    A = datum.A
    r = datum.r
    rho = auto_radius(datum) if cfg.contour_radius is None else float(cfg.contour_radius)
    _check_clearance(datum, rho)
    x = np.asarray(datum.x) - np.floor(datum.x)
    decay = TWO_PI * np.minimum(x, 1.0 - x)
    gap = _pole_gap(datum.y)
    # |1 - e(y) q| >= floor_y for q in [0, 1]
    cos_y = np.cos(TWO_PI * datum.y)
    floor_y = np.where(cos_y > 0, np.abs(np.sin(TWO_PI * datum.y)), 1.0)
    log_budget = np.log(1.0 / cfg.cutoff) + r * np.log(1.0 / max(float(np.min(floor_y)), 1e-300))
    box = log_budget / decay
    reach = _orthant_reach(A, box)
    growth = max(0.0, float(np.max(s.real)) - 1.0) * np.log(max(float(np.max(reach)), 1.0))
    if growth > 0:
        box = (log_budget + growth) / decay
        reach = _orthant_reach(A, box)
    hcap = np.empty(r)
    for mu in range(r):
        smooth = 4.0 / (TWO_PI * float(np.max(np.abs(A[mu]))) + 1e-300)
        cap = smooth
        for nu in range(r):
            a = A[mu, nu]
            if a == 0.0:
                continue
            others = [o for o in range(r) if o != mu and A[o, nu] != 0.0]
            mixed = any(np.sign(A[o, nu]) != np.sign(a) for o in others)
            if not mixed:
                continue
            imag = sum(rho * abs(A[o, nu]) for o in others if hankel[o])
            cap = min(cap, cfg.panel_scale * (gap[nu] - imag) / abs(a))
        hcap[mu] = cap
    return _Geometry(rho=rho, box=box, reach=reach, hcap=hcap)


def _far_edges(start, stop, hcap):
    edges = [start]
    p = start
    while p < stop:
        width = min(p, 2.0 * hcap)
        if width >= 2.0 * hcap:
            n = int(np.ceil((stop - p) / (2.0 * hcap)))
            edges.extend(p + 2.0 * hcap * np.arange(1, n + 1))
            break
        p = p + width
        edges.append(p)
    return np.asarray(edges)


# -- one-dimensional rules ---------------------------------------------------

class _Rule:
    """Nodes and weights in one variable.

    ``nodes`` are sorted by real part and real unless ``fixed`` is set; fixed
    (circle) nodes are exempt from box pruning.
    """

    def __init__(self, nodes, weights, fixed_nodes=None, fixed_weights=None):
        order = np.argsort(np.real(nodes))
        self.nodes = np.asarray(nodes, dtype=float)[order]
        self.weights = np.asarray(weights, dtype=complex)[order]
        if fixed_nodes is None:
            fixed_nodes = np.zeros(0, dtype=complex)
            fixed_weights = np.zeros(0, dtype=complex)
        self.fixed_nodes = np.asarray(fixed_nodes, dtype=complex)
        self.fixed_weights = np.asarray(fixed_weights, dtype=complex)

    def __len__(self):
        return len(self.nodes) + len(self.fixed_nodes)

    def all_nodes(self):
        return np.concatenate([self.nodes.astype(complex), self.fixed_nodes])

    def all_weights(self):
        return np.concatenate([self.weights, self.fixed_weights])


def _ray_rule(s, geo, mu, cfg, order):
    """Nodes on [rho, T] with weights t^(s-1) dt (no prefactor)."""
    edges = _far_edges(geo.rho, max(geo.reach[mu], 2 * geo.rho), geo.hcap[mu])
    if (len(edges) - 1) * order > cfg.max_nodes_per_dim:
        raise QuadratureFailure(
            f"variable {mu} needs {(len(edges) - 1) * order} nodes "
            f"(cap {cfg.max_nodes_per_dim})")
    t, w = _panels_gl(edges, order)
    return t, w * np.exp((s - 1.0) * np.log(t))


def _near_rule(s, rho, cfg, order):
    """Nodes on [0, rho] with weights t^s dt/t, including the tail node at 0."""
    V = cfg.near_depth
    edges = np.array([0.0, 1.0, 3.0, 7.0, 15.0, 25.0, V])
    v, w = _panels_gl(edges, order)
    t = rho * np.exp(-v)
    wt = w * np.exp(s * (np.log(rho) - v))
    tail = np.exp(s * (np.log(rho) - V)) / s
    return np.append(t, 0.0), np.append(wt, tail)


def _circle_rule(s, rho, order):
    """Nodes on |t| = rho, arg 0 -> 2 pi, with weights t^s dt/t."""
    edges = np.linspace(0.0, TWO_PI, 8)
    th, w = _panels_gl(edges, order)
    t = rho * np.exp(1j * th)
    wt = 1j * w * np.exp(s * np.log(rho) + 1j * s * th)
    return t, wt


def _orthant_prefactor(s):
    """2 / Gamma_C(s) = (2 pi)^s / Gamma(s)."""
    return complex(np.exp(s * np.log(TWO_PI)) * special.rgamma(s))


def _loop_prefactor(s):
    """e(-s/2) Gamma_C(1 - s) / (2i)."""
    if abs(s.imag) < 1e-12 and s.real > 0.5 and abs(s.real - round(s.real)) < 1e-12:
        raise PrefactorPole(f"loop prefactor is singular at s={s}")
    return complex(e_of(-s / 2) * np.exp((s - 1) * np.log(TWO_PI)) * special.gamma(1 - s) / 1j)


def _rule_for(kind, s, geo, mu, cfg, order):
    pre = _orthant_prefactor(s)
    if kind == "orthant":
        ray_t, ray_w = _ray_rule(s, geo, mu, cfg, order)
        near_t, near_w = _near_rule(s, geo.rho, cfg, order)
        return _Rule(np.concatenate([near_t, ray_t]), pre * np.concatenate([near_w, ray_w]))
    circ_t, circ_w = _circle_rule(s, geo.rho, order)
    if pre == 0:
        # nonpositive integer: the ray contributions cancel exactly
        return _Rule(np.zeros(0), np.zeros(0), circ_t, _loop_prefactor(s) * circ_w)
    ray_t, ray_w = _ray_rule(s, geo, mu, cfg, order)
    return _Rule(ray_t, pre * ray_w, circ_t, _loop_prefactor(s) * circ_w)


# -- tensor evaluation --------------------------------------------------------

def _phi_block(w, x, y):
    """phi(w, x, y) for real or complex arrays, x and y in (0, 1)."""
    if np.iscomplexobj(w):
        from .core import phi
        return phi(w, x, y)
    c, sn = np.cos(TWO_PI * y), np.sin(TWO_PI * y)
    neg = w < 0
    aw = np.abs(w)
    q = np.exp(-TWO_PI * aw)
    num = np.exp(-TWO_PI * aw * np.where(neg, 1.0 - x, x))
    scale = num / (1.0 - 2.0 * c * q + q * q)
    re = scale * np.where(neg, q - c, 1.0 - q * c)
    im = scale * np.where(neg, sn, q * sn)
    return re + 1j * im


def _kernel_block(partial, last, A_last, x, y):
    """F on the block partial[:, None, :] + last[None, :, None] * A_last."""
    out = None
    for nu in range(len(x)):
        w = partial[:, nu][:, None] + last[None, :] * A_last[nu]
        f = _phi_block(w, x[nu], y[nu])
        out = f if out is None else out * f
    return out


_BLOCK = 1 << 18


def tensor_sum(rules, datum, box):
    """sum over the tensor grid of prod(weights) * F(tA, x, y), box-pruned.

    Grid points whose real part maps outside ``|(tA)_nu| <= box_nu`` are
    skipped.  Returns ``(value, abs_sum)``; ``abs_sum`` is the sum of the
    absolute values of the terms, used for rounding estimates.
    """
    A, x, y = datum.A, datum.x - np.floor(datum.x), datum.y - np.floor(datum.y)
    r = datum.r
    last = rules[-1]
    if r == 1:
        prefix_nodes = np.zeros((1, 0), dtype=complex)
        prefix_w = np.ones(1, dtype=complex)
    else:
        grids = np.meshgrid(*[rl.all_nodes() for rl in rules[:-1]], indexing="ij")
        wgrids = np.meshgrid(*[rl.all_weights() for rl in rules[:-1]], indexing="ij")
        prefix_nodes = np.stack([g.ravel() for g in grids], axis=1)
        prefix_w = np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1)
    partial = prefix_nodes @ A[:-1] if r > 1 else np.zeros((1, r), dtype=complex)
    cre = partial.real
    a_last = A[-1]
    lo = np.full(len(prefix_w), -np.inf)
    hi = np.full(len(prefix_w), np.inf)
    alive = np.ones(len(prefix_w), dtype=bool)
    for nu in range(r):
        a = a_last[nu]
        if a == 0.0:
            alive &= np.abs(cre[:, nu]) <= box[nu]
            continue
        b1 = (-box[nu] - cre[:, nu]) / a
        b2 = (box[nu] - cre[:, nu]) / a
        lo = np.maximum(lo, np.minimum(b1, b2))
        hi = np.minimum(hi, np.maximum(b1, b2))
    alive &= lo <= hi
    idx = np.nonzero(alive)[0]
    if not np.iscomplexobj(prefix_nodes) or not np.any(prefix_nodes.imag):
        partial = partial.real
    lo_i = np.searchsorted(last.nodes, lo[idx], side="left")
    hi_i = np.searchsorted(last.nodes, hi[idx], side="right")
    order = np.argsort(lo_i, kind="stable")
    idx, lo_i, hi_i = idx[order], lo_i[order], hi_i[order]

    total = 0j
    abs_total = 0.0
    n = len(idx)
    start = 0
    while start < n:
        span = max(int(np.max(hi_i[start:start + 64]) - lo_i[start]) if start < n else 1, 1)
        step = max(1, min(n - start, _BLOCK // span))
        sl = slice(start, start + step)
        j0 = int(np.min(lo_i[sl]))
        j1 = int(np.max(hi_i[sl]))
        rows = idx[sl]
        if j1 > j0:
            tl = last.nodes[j0:j1]
            block = _kernel_block(partial[rows], tl, a_last, x, y)
            cols = np.arange(j0, j1)
            mask = (cols[None, :] >= lo_i[sl][:, None]) & (cols[None, :] < hi_i[sl][:, None])
            terms = np.where(mask, block * last.weights[j0:j1][None, :], 0.0) * prefix_w[rows][:, None]
            total += terms.sum()
            abs_total += np.abs(terms).sum()
        start += step
    if len(last.fixed_nodes):
        # circle nodes: |t| = rho, never pruned within a live row
        rows = idx
        for c0 in range(0, len(rows), max(1, _BLOCK // len(last.fixed_nodes))):
            rr = rows[c0:c0 + max(1, _BLOCK // len(last.fixed_nodes))]
            block = _kernel_block(partial[rr].astype(complex), last.fixed_nodes, a_last, x, y)
            terms = block * last.fixed_weights[None, :] * prefix_w[rr][:, None]
            total += terms.sum()
            abs_total += np.abs(terms).sum()
    return complex(total), float(abs_total)


# -- polar fast path for degree 2 ---------------------------------------------
#
# In t = lambda (cos th, sin th) the lines where a linear form (tA)_nu
# vanishes are fixed angles.  The radial variable is rescaled by the exact
# directional decay rate kappa(th) of F, so one radial rule serves every
# angle, and the angular rule is graded geometrically towards the ridge
# angles.  kappa has kinks only at ridge angles, which are panel edges.

def graded_edges(a, b, *, left_sing, left_min, right_sing, right_min, cap):
    """Panel edges on [a, b], refined geometrically towards singular points.

    Widths obey ``w(p) <= max(left_min, p - left_sing)`` on the way out from
    the left point and ``w(p) <= max(right_min, (right_sing - p) / 2)`` on
    the way in to the right point, and never exceed ``cap`` (a number or a
    function of position).
    """
    cap_at = cap if callable(cap) else (lambda p, c=cap: c)
    edges = [a]
    p = a
    while p < b:
        w = min(max(left_min, p - left_sing), max(right_min, 0.5 * (right_sing - p)))
        c = cap_at(p)
        w = min(w, c, cap_at(min(p + min(w, c), b)))
        if not w > 0:
            raise QuadratureFailure("degenerate panel layout")
        if p + 1.5 * w >= b:
            edges.append(b)
            break
        p += w
        edges.append(p)
    return np.asarray(edges)


def _ridge_angles(A):
    """Angles in (0, pi/2) where (omega A)_nu = 0; None if a ridge hits an edge."""
    out = []
    for nu in range(2):
        a1, a2 = A[0, nu], A[1, nu]
        if a1 == 0.0 or a2 == 0.0:
            return None
        if a1 * a2 < 0:
            out.append((float(np.arctan(-a1 / a2)), nu))
    return sorted(out)


def _directional_rate(theta, A, x):
    """kappa(theta) = 2 pi sum_nu x'_nu |(omega A)_nu| (x' = x or 1 - x by sign),
    its derivative, and omega(theta) A."""
    theta = np.asarray(theta, dtype=float)
    om = np.stack([np.cos(theta), np.sin(theta)], axis=-1) @ A
    dom = np.stack([-np.sin(theta), np.cos(theta)], axis=-1) @ A
    xx = np.where(om < 0, x - 1.0, x)
    return TWO_PI * np.sum(xx * om, axis=-1), TWO_PI * np.sum(xx * dom, axis=-1), om


# GL on a panel of half-width H resolves e^{i w t} to ~1e-12 when w H <= this
_OSC_REACH = 3.0


def _radial_rule(S, rho_mu, t_mu, cfg, order, cap):
    mu_near, w_near = _near_rule(S, rho_mu, cfg, order)
    edges = graded_edges(rho_mu, max(t_mu, 2 * rho_mu), left_sing=0.0, left_min=0.0,
                         right_sing=np.inf, right_min=0.0, cap=cap)
    if (len(edges) - 1) * order > cfg.max_nodes_per_dim:
        raise QuadratureFailure("radial rule exceeds the node cap")
    mu_far, w_far = _panels_gl(edges, order)
    return (np.concatenate([mu_near, mu_far]),
            np.concatenate([w_near, w_far * np.exp((S - 1.0) * np.log(mu_far))]))


def polar_sum_r2(s, datum, cfg, order, k=None):
    """Orthant integral of F(tA) e(t.k) t^(s-1) dt for r = 2 in polar form.

    ``k = None`` means no oscillating factor.  Returns ``(value, abs_sum)``
    or ``None`` when a ridge lies on an edge of the orthant (a zero matrix
    entry); callers then use the tensor path.
    """
    A, x, y = datum.A, datum.x, datum.y
    ridges = _ridge_angles(A)
    if ridges is None:
        return None
    s = np.asarray(s, dtype=complex)
    S = s[0] + s[1]
    kk = None if k is None or not np.any(k) else np.asarray(k, dtype=float)
    gap = _pole_gap(y)
    m = np.minimum(x, 1.0 - x)
    cos_y = np.cos(TWO_PI * y)
    floor_y = np.where(cos_y > 0, np.abs(np.sin(TWO_PI * y)), 1.0)
    budget = np.log(1.0 / cfg.cutoff) + 2.0 * np.log(1.0 / float(np.min(floor_y)))
    t_mu = budget
    for _ in range(2):
        t_mu = budget + max(0.0, S.real - 1.0) * np.log(max(t_mu, 1.0))
    rho_mu = np.pi * float(np.min(m)) * float(np.min(gap))

    # angular rule
    half_pi = 0.5 * np.pi
    cap = 0.15 if order >= 16 else 0.1

    def ridge_min(angle, nu):
        kap, _, _ = _directional_rate(angle, A, x)
        norm = float(np.hypot(A[0, nu], A[1, nu]))
        return 2.0 * cfg.panel_scale * gap[nu] * float(kap) / (t_mu * norm)

    th_parts, w_parts = [], []
    inner = [(a, a, ridge_min(a, nu)) for a, nu in ridges]
    first = ridges[0][0] if ridges else half_pi
    last = ridges[-1][0] if ridges else 0.0
    th0 = min(0.2, 0.4 * first)
    th1 = min(0.2, 0.4 * (half_pi - last))
    stops = [(th0, 0.0, 0.0)] + inner + [(half_pi - th1, half_pi, 0.0)]
    for (a, a_sing, a_min), (b, b_sing, b_min) in zip(stops[:-1], stops[1:]):
        e = graded_edges(a, b, left_sing=a_sing, left_min=a_min, right_sing=b_sing,
                         right_min=b_min, cap=cap)
        if (len(e) - 1) * order > cfg.max_nodes_per_dim:
            raise QuadratureFailure("angular rule exceeds the node cap")
        th, w = _panels_gl(e, order)
        th_parts.append(th)
        w_parts.append(w * np.exp((s[0] - 1.0) * np.log(np.cos(th))
                                  + (s[1] - 1.0) * np.log(np.sin(th))))
    # t^(s-1) is singular on the edges: theta = th0 e^{-v} near 0 and
    # pi/2 - th1 e^{-v} near pi/2
    for expo, other, zone, at_zero in ((s[1], s[0], th0, True), (s[0], s[1], th1, False)):
        v, vw = _near_rule(expo, zone, cfg, order)
        safe = np.where(v > 0, v, 1.0)
        th_parts.append(v if at_zero else half_pi - v)
        w_parts.append(vw * np.where(v > 0, (np.sin(safe) / safe) ** (expo - 1.0), 1.0)
                       * np.cos(v) ** (other - 1.0))
    theta = np.concatenate(th_parts)
    w_th = np.concatenate(w_parts)
    kap, _, om = _directional_rate(theta, A, x)
    w_th = w_th * np.exp(-S * np.log(kap))
    coef = om / kap[:, None]

    # Radial integrals.  With an oscillating factor e^{i beta mu} the ray is
    # turned to arg mu = alpha (sign of beta): the kernel poles sit on the
    # imaginary mu axis, so any |alpha| < pi/2 is admissible, and alpha =
    # arctan|beta| (capped at pi/4) trades the oscillation for decay.  On the
    # turned ray the integrand decays like exp(-D mu), D = cos alpha +
    # |beta| sin|alpha|, so each ray is rescaled to nu = D mu; the residual
    # oscillation per unit nu is then below 1 and pole offsets from the ray
    # are at least their positions along it (tan alpha <= 1).
    if kk is None:
        beta = np.zeros(len(theta))
    else:
        beta = TWO_PI * (np.stack([np.cos(theta), np.sin(theta)], axis=-1) @ kk) / kap
    alpha = np.sign(beta) * np.minimum(np.arctan(np.abs(beta)), 0.25 * np.pi)
    decay = np.cos(alpha) + np.abs(beta) * np.abs(np.sin(alpha))
    omega = np.abs(np.abs(beta) * np.cos(alpha) - np.abs(np.sin(alpha))) / decay
    hcap = np.minimum(3.0, _OSC_REACH / np.maximum(omega, 1e-300))
    level = np.maximum(0, np.ceil(np.log2(3.0 / hcap) - 1e-12)).astype(int)
    total = 0j
    abs_total = 0.0
    for lev in np.unique(level):
        rows = np.nonzero(level == lev)[0]
        rad, w_rad = _radial_rule(S, rho_mu, t_mu, cfg, order, 3.0 * 2.0 ** (-lev))
        step = max(1, _BLOCK // len(rad))
        for i0 in range(0, len(rows), step):
            sl = rows[i0:i0 + step]
            if kk is None:
                mu = np.broadcast_to(rad[None, :], (len(sl), len(rad)))
                wrow = w_th[sl]
            else:
                rot = np.exp(1j * alpha[sl]) / decay[sl]
                mu = rot[:, None] * rad[None, :]
                wrow = w_th[sl] * np.exp(S * (1j * alpha[sl] - np.log(decay[sl])))
            block = None
            for nu in range(2):
                f = _phi_block(coef[sl, nu][:, None] * mu, x[nu], y[nu])
                block = f if block is None else block * f
            if kk is not None:
                block = block * np.exp(1j * beta[sl][:, None] * mu)
            terms = block * (wrow[:, None] * w_rad[None, :])
            total += terms.sum()
            abs_total += np.abs(terms).sum()
    return complex(total), float(abs_total)


# -- public evaluators ----------------------------------------------------------

MAX_DEGREE_MSG = f"tensor quadrature is capped at degree r <= {MAX_DEGREE}"


def _prepare(s, datum):
    sp = SpectralPoint(s)
    if sp.r != datum.r:
        raise ShintaniError(f"s has {sp.r} components, datum has degree {datum.r}")
    if datum.r > MAX_DEGREE:
        raise QuadratureFailure(MAX_DEGREE_MSG)
    if not datum.in_unit_cube:
        raise ShintaniError("integral evaluators need x, y in (0,1)^r; reduce the torus first")
    return sp.s


def _evaluate(s, datum, cfg, kinds, method, force_tensor=False):
    geo = _geometry(datum, cfg, s, [k == "hankel" for k in kinds])

    def run(c):
        if datum.r == 2 and all(k == "orthant" for k in kinds) and not force_tensor:
            out = polar_sum_r2(s, datum, c, c.order)
            if out is not None:
                pre = _orthant_prefactor(s[0]) * _orthant_prefactor(s[1])
                return out[0] * pre, out[1] * abs(pre)
        rules = [_rule_for(k, s[mu], geo, mu, c, c.order) for mu, k in enumerate(kinds)]
        return tensor_sum(rules, datum, geo.box)

    value, abs_sum = run(cfg)
    err = 64 * np.finfo(float).eps * abs_sum
    if cfg.estimate_error:
        coarse, _ = run(cfg.coarse())
        err += abs(value - coarse)
    return EvalResult(value, err, method)


def integral_L(s, datum, cfg=None, *, tensor=False):
    """Shintani L-function from the positive-orthant integral.

    Needs all Re s_nu >= margin; ``A`` may have any sign pattern.  Degree 2
    uses polar coordinates unless ``tensor`` is set.
    """
    cfg = cfg or QuadConfig()
    s = _prepare(s, datum)
    if np.any(s.real < cfg.margin):
        raise RegionError(f"orthant integral needs Re s >= {cfg.margin}, got {s}")
    return _evaluate(s, datum, cfg, ["orthant"] * datum.r, "integral", force_tensor=tensor)


def contour_L(s, datum, cfg=None):
    """Shintani L-function from the loop integral, for any s off the positive integers."""
    cfg = cfg or QuadConfig()
    s = _prepare(s, datum)
    for sv in s:
        _loop_prefactor(sv)
    return _evaluate(s, datum, cfg, ["hankel"] * datum.r, "contour")


def hybrid_L(s, datum, cfg=None):
    """Orthant rule in variables with Re s_nu >= margin, loop rule elsewhere."""
    cfg = cfg or QuadConfig()
    s = _prepare(s, datum)
    kinds = ["orthant" if sv.real >= cfg.margin else "hankel" for sv in s]
    for sv, k in zip(s, kinds):
        if k == "hankel":
            _loop_prefactor(sv)
    return _evaluate(s, datum, cfg, kinds, "contour" if "hankel" in kinds else "integral")


# -- Fourier transform of F ------------------------------------------------------

@dataclass(frozen=True)
class FourierCheck:
    """Quadrature value of int F(tA) e(t.k) dt next to its closed form."""

    lhs: EvalResult
    rhs: complex

    @property
    def residual(self):
        return abs(self.lhs.value - self.rhs)


MAX_WAVEVECTOR = 10.0


def fourier_rhs(datum, k):
    """(i^r / |det A|) e(-y.x) F(kA*, y, 1 - x)."""
    k = np.asarray(k, dtype=float)
    dual = ShintaniDatum(datum.Astar, datum.y, 1.0 - datum.x)
    return complex(1j ** (datum.r % 4) / abs(datum.detA) * e_of(-float(datum.y @ datum.x))
                   * F_prod(k, dual))


def _trapezoid_rules(datum, k, cfg, geo):
    rules = []
    gap = _pole_gap(datum.y)
    reach = np.abs(np.linalg.inv(datum.A)).T @ geo.box   # whole space, not one orthant
    # tolerated aliasing level, relative to the integrand scale
    depth = np.log(1.0 / cfg.cutoff)
    for mu in range(datum.r):
        row = np.abs(datum.A[mu])
        d = 0.9 * float(np.min(np.where(row > 0, gap / np.where(row > 0, row, 1.0), np.inf)))
        h = cfg.fourier_step or 1.0 / (abs(k[mu]) + depth / (TWO_PI * d))
        n = int(np.ceil(reach[mu] / h))
        if 2 * n + 1 > cfg.max_nodes_per_dim:
            raise QuadratureFailure(f"trapezoid in variable {mu} needs {2 * n + 1} nodes")
        t = h * np.arange(-n, n + 1)
        rules.append(_Rule(t, h * np.exp(2j * np.pi * k[mu] * t)))
    return rules


def fourier_F(datum, k, cfg=None):
    """Quadrature of int_{R^r} F(tA, x, y) e(t.k) dt and its closed form.

    Degree 2 splits the plane into quadrants and integrates each in polar
    form; other degrees use a tensor trapezoid on the real line.  ``err``
    covers the quadrature side only.
    """
    cfg = cfg or QuadConfig()
    k = np.atleast_1d(np.asarray(k, dtype=float))
    if k.shape != (datum.r,):
        raise ShintaniError(f"wave vector has shape {k.shape}, expected ({datum.r},)")
    if datum.r > MAX_DEGREE:
        raise QuadratureFailure(MAX_DEGREE_MSG)
    if not datum.in_unit_cube:
        raise ShintaniError("fourier_F needs x, y in (0,1)^r; reduce the torus first")
    if np.any(np.abs(k) > MAX_WAVEVECTOR):
        raise QuadratureFailure(f"|k| exceeds {MAX_WAVEVECTOR:g}; the grid would not resolve it")

    def run(c):
        if datum.r == 2:
            total, abs_total = 0j, 0.0
            parts = []
            for sigma in SignVector.all(2):
                sd = datum.signed(sigma)
                out = polar_sum_r2(np.ones(2), sd, c, c.order, k=np.asarray(sigma.sigma) * k)
                if out is None:
                    parts = None
                    break
                parts.append(out)
            if parts is not None:
                for v, a in parts:
                    total += v
                    abs_total += a
                return total, abs_total
        geo = _geometry(datum, c, np.ones(datum.r, dtype=complex), [False] * datum.r)
        return tensor_sum(_trapezoid_rules(datum, k, c, geo), datum, geo.box)

    value, abs_sum = run(cfg)
    err = 64 * np.finfo(float).eps * abs_sum
    if cfg.estimate_error:
        coarse, _ = run(cfg.coarse() if datum.r == 2 else replace(cfg, cutoff=cfg.cutoff * 1e4))
        err += abs(value - coarse)
    return FourierCheck(EvalResult(value, err, "integral"), fourier_rhs(datum, k))
