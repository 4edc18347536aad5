"""Command line front end: problem-file evaluation and verification sweeps.

    shintani eval problem.json [--method auto] [--format json] [--out PATH]
    shintani check fe --r 2 --samples 50 --seed 42 --tol 1e-8

Random instances come from ``numpy.random.default_rng(seed)`` (PCG64) with
fixed distributions:

* matrix entries: random sign times uniform [0.5, 2] (mixed suites) or
  uniform [0.5, 2] (positive suites), redrawn while cond(A) > 100,
* torus points x, y: uniform [0.1, 0.9] per coordinate,
* parity types: uniform bits,
* s: per suite, see ``SUITES``.

Exit codes: 0 success, 1 an evaluation failed or a residual exceeded
``--tol``, 2 invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import replace

import numpy as np

from . import lfunction, quadrature, series, taylor
from .core import ParityType, ShintaniDatum, gamma_chi
from .errors import ShintaniError

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
# values scale like powers of 1/|det A|; beyond this, absolute tolerances
# near 1e-8 fall below the double-precision spacing of the values themselves
MAX_CONDITION = 100.0


class InputError(Exception):
    """Malformed problem file or flag combination."""


# -- encoding --------------------------------------------------------------------

def cplx(z):
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def parse_complex(v):
    if isinstance(v, dict) and set(v) == {"re", "im"}:
        return complex(float(v["re"]), float(v["im"]))
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(_is_number(u) for u in v):
        return complex(float(v[0]), float(v[1]))
    if _is_number(v):
        return complex(float(v))
    raise InputError(f"cannot read a complex number from {v!r}")


def _is_number(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _is_complex_like(v):
    try:
        parse_complex(v)
        return True
    except InputError:
        return False


def parse_points(raw, r):
    """s as one point (list of r complex values) or a list of such points."""
    if not isinstance(raw, list) or not raw:
        raise InputError("'s' must be a non-empty list")
    # a flat list of r complex values is one point; [re, im] pairs read as
    # complex values, so several points need an extra level of nesting
    points = [raw] if len(raw) == r and all(_is_complex_like(v) for v in raw) else raw
    out = []
    for p in points:
        if not isinstance(p, list) or len(p) != r:
            raise InputError(f"each s must have {r} components, got {p!r}")
        out.append(np.array([parse_complex(v) for v in p]))
    return out


def load_problem(path):
    """Read and validate a problem file; returns (datum, chi, points, variant, method)."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read problem file: {exc}") from None
    if not isinstance(data, dict):
        raise InputError("problem file must hold a JSON object")
    missing = {"r", "A", "x", "y", "s"} - set(data)
    if missing:
        raise InputError(f"problem file lacks keys {sorted(missing)}")
    unknown = set(data) - {"r", "A", "x", "y", "chi", "s", "variant", "method"}
    if unknown:
        raise InputError(f"unknown keys {sorted(unknown)}")
    r = data["r"]
    if not isinstance(r, int) or r < 1:
        raise InputError(f"r must be a positive integer, got {r!r}")
    try:
        A = np.array(data["A"], dtype=float)
        x = np.array(data["x"], dtype=float)
        y = np.array(data["y"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"A, x, y must be numeric: {exc}") from None
    if A.shape != (r, r) or x.shape != (r,) or y.shape != (r,):
        raise InputError(f"shapes A{A.shape}, x{x.shape}, y{y.shape} do not match r={r}")
    datum = ShintaniDatum(A, x, y)
    chi = data.get("chi")
    if chi is not None:
        if not isinstance(chi, list) or len(chi) != r or any(b not in (0, 1) for b in chi):
            raise InputError(f"chi must be a list of {r} bits")
        chi = ParityType(tuple(chi))
    variant = lfunction.Variant(str(data.get("variant", "NORMALIZED")).upper())
    method = lfunction.Method(str(data.get("method", "auto")).lower())
    points = parse_points(data["s"], r)
    return datum, chi, points, variant, method


# -- configuration ---------------------------------------------------------------

def build_config(args):
    quad = lfunction.LConfig().quad
    alt = lfunction.LConfig().alt_quad
    if args.quad_step is not None:
        quad = replace(quad, panel_scale=args.quad_step)
        alt = replace(alt, panel_scale=0.8 * args.quad_step)
    # the series target follows --tol but stays within what doubles can deliver
    ser = series.SeriesConfig(tol=min(max(args.tol, 1e-15), 1e-12)) if args.tol is not None \
        else series.SeriesConfig()
    return lfunction.LConfig(quad=quad, alt_quad=alt, series=ser, taylor_order=args.taylor_order)


def config_echo(args, cfg):
    return {
        "seed": getattr(args, "seed", None),
        "tol": args.tol,
        "quad_step": cfg.quad.panel_scale,
        "quad_order": cfg.quad.order,
        "taylor_order": cfg.taylor_order,
        "method": getattr(args, "method", None),
    }


# -- eval ------------------------------------------------------------------------

def _eval_case(index, s, datum, chi, variant, method, cfg):
    rec = {"index": index, "s": [cplx(v) for v in s], "variant": variant.value,
           "chi": None if chi is None else list(chi.chi)}
    try:
        req = lfunction.LRequest(datum, s, chi, variant, method)
        res = lfunction.evaluate(req, cfg)
        rec.update(status="ok", value=cplx(res.value), err=res.err, method=res.method)
        if variant in (lfunction.Variant.COMPLETED, lfunction.Variant.R_COMPLETED):
            factor = abs(datum.detA) ** 0.5 * gamma_chi(s, chi)
            base_variant = lfunction.Variant.NORMALIZED if variant == lfunction.Variant.COMPLETED \
                else lfunction.Variant.R
            base = lfunction.evaluate(lfunction.LRequest(datum, s, chi, base_variant, method), cfg)
            rec["factor"] = cplx(factor)
            rec["uncompleted"] = cplx(base.value)
            rec["factor_check"] = abs(res.value - factor * base.value)
    except ShintaniError as exc:
        rec.update(status="error", error=f"{type(exc).__name__}: {exc}")
    return rec


def cmd_eval(args):
    cfg = build_config(args)
    datum, chi, points, variant, method = load_problem(args.problem)
    if args.method is not None:
        method = lfunction.Method(args.method)
    cases = [_eval_case(i, s, datum, chi, variant, method, cfg) for i, s in enumerate(points)]
    errors = sum(c["status"] != "ok" for c in cases)
    report = {
        "command": "eval",
        "problem": {"r": datum.r, "A": datum.A.tolist(), "x": datum.x.tolist(), "y": datum.y.tolist()},
        "config": config_echo(args, cfg),
        "cases": cases,
        "summary": {"cases": len(cases), "errors": errors, "passed": errors == 0},
    }
    return report, (EXIT_OK if errors == 0 else EXIT_FAIL)


# -- check suites ----------------------------------------------------------------

def random_matrix(rng, r, positive=False):
    mag = rng.uniform(0.5, 2.0, size=(r, r))
    if positive:
        return mag
    return rng.choice([-1.0, 1.0], size=(r, r)) * mag


def random_datum(rng, r, positive=False):
    """Matrix redrawn until cond(A) <= MAX_CONDITION, then x and y."""
    while True:
        A = random_matrix(rng, r, positive)
        if np.linalg.cond(A) <= MAX_CONDITION:
            break
    x = rng.uniform(0.1, 0.9, r)
    y = rng.uniform(0.1, 0.9, r)
    return ShintaniDatum(A, x, y)


def random_s(rng, r, re_lo, re_hi, im=1.0):
    return rng.uniform(re_lo, re_hi, r) + 1j * rng.uniform(-im, im, r)


def random_chi(rng, r):
    return ParityType(tuple(int(b) for b in rng.integers(0, 2, r)))


def _datum_echo(d):
    return {"A": d.A.tolist(), "x": d.x.tolist(), "y": d.y.tolist()}


def _residual_record(index, inputs, residual, err, extra=None):
    rec = {"index": index, **inputs, "residual": float(residual), "err": float(err)}
    if extra:
        rec.update(extra)
    return rec


def suite_fe(rng, args, cfg):
    """Functional equation at Re s in [0.2, 0.8], |Im s| <= 1, mixed-sign A."""
    for i in range(args.samples):
        d = random_datum(rng, args.r)
        s = random_s(rng, args.r, 0.2, 0.8)
        chi = random_chi(rng, args.r)
        inputs = {**_datum_echo(d), "chi": list(chi.chi), "s": [cplx(v) for v in s]}
        yield i, inputs, lambda d=d, s=s, chi=chi: _from_residual(lfunction.fe_check(s, d, chi, cfg))


def suite_fourier(rng, args, cfg):
    """Fourier transform of F(tA, x, y) at integer k with |k_nu| <= 2."""
    qcfg = cfg.quad
    for i in range(args.samples):
        d = random_datum(rng, args.r)
        k = rng.integers(-2, 3, args.r).astype(float)
        inputs = {**_datum_echo(d), "k": k.astype(int).tolist()}

        def run(d=d, k=k):
            chk = quadrature.fourier_F(d, k, qcfg)
            return chk.residual, chk.lhs.err, {"lhs": cplx(chk.lhs.value), "rhs": cplx(chk.rhs)}
        yield i, inputs, run


def suite_derivative(rng, args, cfg):
    """x-relation on L_chi and y-relation on R_chi at Re s in [1.2, 1.8]."""
    for i in range(args.samples):
        d = random_datum(rng, args.r)
        s = random_s(rng, args.r, 1.2, 1.8)
        chi = random_chi(rng, args.r)
        nu = int(rng.integers(0, args.r))
        inputs = {**_datum_echo(d), "chi": list(chi.chi), "s": [cplx(v) for v in s], "direction": nu}

        def run(d=d, s=s, chi=chi, nu=nu):
            rx = lfunction.derivative_check(s, d, chi, nu, cfg, "x")
            ry = lfunction.derivative_check(s, d, chi, nu, cfg, "y")
            return (max(rx.value, ry.value), max(rx.err, ry.err),
                    {"residual_x": rx.value, "residual_y": ry.value})
        yield i, inputs, run


def suite_oracle(rng, args, cfg):
    """Three independent methods on the same value.

    Degree one: normalized L_chi by the bilateral series, orthant quadrature
    and loop quadrature (mixed-sign a, Re s in [1.5, 2.5]).  Higher degree:
    ordinary L for positive A by the series, orthant and loop quadrature
    (Re s_nu in [(r + 0.5)/r, (r + 0.5)/r + 1]).
    """
    r = args.r
    for i in range(args.samples):
        if r == 1:
            d = random_datum(rng, 1)
            s = random_s(rng, 1, 1.5, 2.5)
            chi = random_chi(rng, 1)
            inputs = {**_datum_echo(d), "chi": list(chi.chi), "s": [cplx(v) for v in s]}

            def run(d=d, s=s, chi=chi):
                a = series.bilateral_r1(s[0], float(d.A[0, 0]), float(d.x[0]), float(d.y[0]),
                                        chi.chi[0], cfg.series)
                b = lfunction.L_normalized(s, d, chi, cfg, lfunction.Method.INTEGRAL)
                c = lfunction.L_normalized(s, d, chi, cfg, lfunction.Method.CONTOUR)
                return _triple(a, b, c)
        else:
            d = random_datum(rng, r, positive=True)
            lo = (r + 0.5) / r
            s = random_s(rng, r, lo, lo + 1.0)
            inputs = {**_datum_echo(d), "s": [cplx(v) for v in s]}

            def run(d=d, s=s):
                a = series.dirichlet_L(s, d, cfg.series)
                b = quadrature.integral_L(s, d, cfg.quad)
                c = quadrature.contour_L(s, d, cfg.quad)
                return _triple(a, b, c)
        yield i, inputs, run


def _triple(a, b, c):
    res = max(abs(a.value - b.value), abs(b.value - c.value), abs(a.value - c.value))
    return res, a.err + b.err + c.err, {"series": cplx(a.value), "integral": cplx(b.value),
                                        "contour": cplx(c.value)}


def suite_special(rng, args, cfg):
    """Special values at integers for every parity type.

    For each datum and each k in {0..kmax}^r:

    * k = 1 - chi (mod 2): Taylor value of L_chi(-k) against the functional
      equation with quadrature on the right,
    * otherwise: the exact zero against loop quadrature at s = -k,
    * k >= 1 with k = chi (mod 2): closed form of L_chi(k) against orthant
      quadrature.
    """
    r = args.r
    grid = np.stack(np.meshgrid(*([np.arange(args.kmax + 1)] * r), indexing="ij"), -1).reshape(-1, r)
    index = 0
    for _ in range(args.samples):
        d = random_datum(rng, r)
        for chi in ParityType.all(r):
            for k in grid:
                k = tuple(int(v) for v in k)
                mi = taylor.MultiIndex(k)
                base = {**_datum_echo(d), "chi": list(chi.chi), "k": list(k)}
                s_neg = -np.array(k, dtype=complex)
                if mi.congruent(chi.complement()):
                    yield index, {**base, "kind": "negative"}, \
                        (lambda d=d, chi=chi, mi=mi, s=s_neg: _special_neg(d, chi, mi, s, cfg))
                else:
                    yield index, {**base, "kind": "zero"}, \
                        (lambda d=d, chi=chi, s=s_neg: _special_zero(d, chi, s, cfg))
                index += 1
                if min(k) >= 1 and mi.congruent(chi):
                    yield index, {**base, "kind": "positive"}, \
                        (lambda d=d, chi=chi, mi=mi: _special_pos(d, chi, mi, cfg))
                    index += 1


def _special_neg(d, chi, mi, s, cfg):
    value, err = taylor.special_value_neg(mi, d, chi, cfg.taylor_order)
    ref = lfunction.continue_L(s, d, chi, cfg)
    return abs(value - ref.value), err + ref.err, {"taylor": cplx(value), "quadrature": cplx(ref.value)}


def _special_zero(d, chi, s, cfg):
    value, _ = taylor.special_value_neg(taylor.MultiIndex(tuple(int(-v.real) for v in s)), d, chi)
    ref = lfunction.L_normalized(s, d, chi, cfg, lfunction.Method.CONTOUR)
    return abs(value - ref.value), ref.err, {"taylor": cplx(value), "quadrature": cplx(ref.value),
                                             "exact_zero": value == 0}


def _special_pos(d, chi, mi, cfg):
    value, err = taylor.special_value_pos(mi, d, chi, cfg.taylor_order)
    ref = lfunction.L_normalized(np.array(mi.k, dtype=complex), d, chi, cfg, lfunction.Method.INTEGRAL)
    return abs(value - ref.value), err + ref.err, {"taylor": cplx(value), "quadrature": cplx(ref.value)}


def _from_residual(res):
    return res.value, res.err, {"lhs": cplx(res.lhs.value), "rhs": cplx(res.rhs.value)}


SUITES = {
    "fe": (suite_fe, 1e-8, 3),
    "fourier": (suite_fourier, 1e-8, 3),
    "derivative": (suite_derivative, 1e-6, 2),
    "oracle": (suite_oracle, 1e-9, 3),
    "special": (suite_special, 1e-8, 2),
}


def cmd_check(args):
    suite, default_tol, max_r = SUITES[args.kind]
    if args.tol is None:
        args.tol = default_tol
    if args.r > max_r:
        raise InputError(f"check {args.kind} supports r <= {max_r}")
    cfg = build_config(args)
    rng = np.random.default_rng(args.seed)
    cases = []
    for index, inputs, run in suite(rng, args, cfg):
        rec = {"index": index, **inputs}
        try:
            residual, err, extra = run()
            rec = _residual_record(index, inputs, residual, err, extra)
            rec["status"] = "ok"
            rec["pass"] = bool(residual <= args.tol)
        except ShintaniError as exc:
            rec.update(status="error", error=f"{type(exc).__name__}: {exc}", residual=None, err=None,
                       **{"pass": False})
        cases.append(rec)
    residuals = [c["residual"] for c in cases if c["residual"] is not None]
    errors = sum(c["status"] != "ok" for c in cases)
    max_res = max(residuals) if residuals else None
    passed = errors == 0 and all(c["pass"] for c in cases)
    report = {
        "command": f"check {args.kind}",
        "r": args.r,
        "samples": args.samples,
        "config": config_echo(args, cfg),
        "cases": cases,
        "summary": {"cases": len(cases), "errors": errors, "max_residual": max_res,
                    "tol": args.tol, "passed": passed},
    }
    return report, (EXIT_OK if passed else EXIT_FAIL)


# -- output ----------------------------------------------------------------------

def _flatten(prefix, v, out):
    if isinstance(v, dict):
        for key, sub in v.items():
            _flatten(f"{prefix}.{key}" if prefix else key, sub, out)
    elif isinstance(v, list):
        for j, sub in enumerate(v):
            _flatten(f"{prefix}[{j}]", sub, out)
    else:
        out[prefix] = "" if v is None else v
    return out


def to_csv(report):
    """One row per case; nested fields become dotted / indexed column names."""
    rows = [_flatten("", c, {}) for c in report["cases"]]
    fields = []
    for row in rows:
        for key in row:
            if key not in fields:
                fields.append(key)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


def render(report, fmt):
    if fmt == "csv":
        return to_csv(report)
    return json.dumps(report, indent=2, allow_nan=False, default=_json_default) + "\n"


def _json_default(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.bool_):
        return bool(v)
    raise TypeError(f"cannot serialize {type(v).__name__}")


# -- argument parsing ------------------------------------------------------------

def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _step(text):
    v = float(text)
    if not 0 < v <= 1:
        raise argparse.ArgumentTypeError(f"--quad-step must lie in (0, 1], got {text}")
    return v


def _nonneg_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return v


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=_positive_float, default=None,
                        help="pass threshold for residuals (eval: series tolerance)")
    common.add_argument("--quad-step", type=_step, default=None,
                        help="quadrature panel width factor in (0, 1]; smaller is finer")
    common.add_argument("--taylor-order", type=_nonneg_int, default=None,
                        help="truncation degree of the Taylor route")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", default=None, help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(prog="shintani", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", parents=[common], help="evaluate a JSON problem file")
    ev.add_argument("problem")
    ev.add_argument("--method", choices=[m.value for m in lfunction.Method], default=None)

    ck = sub.add_parser("check", parents=[common], help="run a seeded verification suite")
    ck.add_argument("kind", choices=sorted(SUITES))
    ck.add_argument("--r", type=_positive_int, default=1)
    ck.add_argument("--samples", type=_positive_int, default=10)
    ck.add_argument("--seed", type=int, default=0)
    ck.add_argument("--kmax", type=_nonneg_int, default=2, help="largest k entry (special)")
    ck.add_argument("--method", choices=[m.value for m in lfunction.Method], default=None,
                    help="accepted for symmetry with eval; suites fix their own methods")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, code = cmd_eval(args) if args.command == "eval" else cmd_check(args)
    except (InputError, ShintaniError, ValueError) as exc:
        print(f"shintani: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = render(report, args.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
