"""Command-line front end: ``mulcalc <command> [flags]``.

Exit codes: 0 success or verification passed, 1 verification failed,
2 usage or input error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import contour, curves, derivative, line_integrals, suite
from . import expr as ex
from .errors import MulcalcError, NumericalError, UnboundNameError
from .quadrature import DEFAULT_CONFIG, QuadratureConfig

FORMAT_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
VERIFY_KINDS = ("ftc", "closed", "concat", "product", "reverse", "power", "ftc-line", "green", "all")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- formatting

def fmt_real(x: float) -> str:
    return f"{x:.15g}"


def fmt_complex(z: complex) -> str:
    z = complex(z)
    return f"{z.real:.15g}{z.imag:+.15g}i"


def to_json(value):
    """Complex -> {"re", "im"}; numpy scalars and tuples to plain JSON."""
    if isinstance(value, dict):
        return {str(k): to_json(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [to_json(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": float(value.real), "im": float(value.imag)}
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


def to_text(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (complex, np.complexfloating)):
        return fmt_complex(value)
    if isinstance(value, (float, np.floating)):
        return fmt_real(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(to_text(v) for v in value) + "]"
    if value is None:
        return "none"
    return str(value)


def emit_report(record: dict, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(to_json(record), sort_keys=True, indent=2)
    lines = []
    for section in ("results", "diagnostics"):
        for key, value in record.get(section, {}).items():
            lines.append(f"{key}: {to_text(value)}")
    if "passed" in record:
        lines.append(f"passed: {to_text(record['passed'])}")
    return "\n".join(lines)


# ---------------------------------------------------------------- inputs

def parse_params(items) -> dict:
    params = {}
    for item in items or ():
        name, sep, value = item.partition("=")
        name = name.strip()
        if not sep or len(name) != 1 or not name.isalpha():
            raise UsageError(f"--param expects NAME=COMPLEX with a one-letter name, got {item!r}")
        params[name] = ex.parse_complex(value, params)
    return params


def _require(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise UsageError(f"{args.command} needs {flags}")


def _curve_text(spec: str) -> str:
    if spec.lstrip().startswith("{"):
        return spec
    path = Path(spec)
    if not path.is_file():
        raise UsageError(f"curve file not found: {spec}")
    return path.read_text()


def _load_curve(args, params):
    _require(args, "curve")
    return curves.curve_from_spec(_curve_text(args.curve), params)


def _parse_rect(text: str) -> line_integrals.Rect:
    try:
        x0, x1, y0, y1 = (float(v) for v in text.split(","))
    except ValueError as err:
        raise UsageError(f"--rect expects x0,x1,y0,y1, got {text!r}") from err
    return line_integrals.Rect(x0, x1, y0, y1)


def _config(args) -> QuadratureConfig:
    return QuadratureConfig(
        panels=args.panels or DEFAULT_CONFIG.panels,
        order=args.order or DEFAULT_CONFIG.order,
        tol=args.quad_tol or DEFAULT_CONFIG.tol,
        max_rounds=DEFAULT_CONFIG.max_rounds,
    )


def _inputs(args) -> dict:
    keys = ("command", "kind", "f", "g", "z", "n", "measure", "rect", "split", "branches",
            "anchor_offset", "tol", "panels", "order", "quad_tol", "suite")
    inputs = {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}
    inputs["param"] = sorted(args.param or [])
    if getattr(args, "curve", None):
        inputs["curve"] = json.loads(_curve_text(args.curve))
    return inputs


def _digest(inputs: dict) -> str:
    canonical = json.dumps(inputs, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


# ---------------------------------------------------------------- commands

def _family_results(family, branches: int) -> dict:
    out = {"I*_0": family.base}
    for n in range(-branches, branches + 1):
        out[f"I*[{n}]"] = family.value(n)
    out["W"] = family.winding
    out["delta_z"] = family.delta_z
    out["single_valued"] = family.single_valued
    out["distinct_count"] = family.distinct_count
    return out


def cmd_star_deriv(args, params, cfg):
    _require(args, "f", "z")
    r = derivative.star_derivative(args.f, ex.parse_complex(args.z, params), params)
    return {"value": r.value, "f_value": r.f_value, "logderiv": r.logderiv}, {}, None


def cmd_star_deriv_n(args, params, cfg):
    _require(args, "f", "z", "n")
    value = derivative.star_derivative_n(args.f, ex.parse_complex(args.z, params), args.n, params)
    return {"value": value, "n": args.n}, {}, None


def cmd_cr_check(args, params, cfg):
    _require(args, "f", "z")
    z = ex.parse_complex(args.z, params)
    tol = args.tol if args.tol is not None else derivative.DEFAULT_TOL
    if args.polar:
        r = derivative.check_cr_polar(args.f, abs(z), math.atan2(z.imag, z.real), args.h, tol, params)
        res = {"r": r.r, "theta": r.theta, "residual_1": r.residual_1, "residual_2": r.residual_2}
    else:
        r = derivative.check_cr(args.f, z, args.h, tol, params)
        res = {"point": r.point, "residual_modulus": r.residual_modulus,
               "residual_argument": r.residual_argument, "residual_classic": r.residual_classic}
    return res, {"h": r.h, "tol": r.tol}, r.passes


def cmd_line_int(args, params, cfg):
    _require(args, "f")
    curve = _load_curve(args, params)
    field = line_integrals.PositiveField.parse(args.f, params)
    log_value = line_integrals.line_log_integral(field, curve, args.measure, cfg)
    return {"value": math.exp(log_value), "log_value": log_value, "measure": args.measure}, {}, None


def cmd_double_int(args, params, cfg):
    _require(args, "f", "rect")
    region = _parse_rect(args.rect)
    field = line_integrals.PositiveField.parse(args.f, params)
    log_value = line_integrals.double_log_integral(field, region, cfg)
    return {"value": math.exp(log_value), "log_value": log_value}, {}, None


def _dump_samples(path_out, family, curve):
    path = family.path
    zs = curve.point(path.times)
    with open(path_out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "z_re", "z_im", "logf_re", "logf_im"])
        for t, z, lf in zip(path.times, zs, path.logf):
            writer.writerow([repr(float(t)), repr(float(z.real)), repr(float(z.imag)),
                             repr(float(lf.real)), repr(float(lf.imag))])


def cmd_complex_int(args, params, cfg):
    _require(args, "f")
    curve = _load_curve(args, params)
    family = contour.complex_star_integral(args.f, curve, cfg, params, anchor_offset=args.anchor_offset)
    if args.dump_samples:
        _dump_samples(args.dump_samples, family, curve)
    diagnostics = {"pieces": family.pieces, "refinement_rounds": family.rounds}
    return _family_results(family, args.branches), diagnostics, None


def _verify_report(report) -> tuple:
    results = {"name": report.name, "lhs": report.lhs, "rhs": report.rhs,
               "abs_err": report.abs_err, "rel_err": report.rel_err,
               "matched_branch": report.matched_branch, "tolerance": report.tol}
    for key, value in sorted(report.details.items()):
        if isinstance(value, (int, float, complex)):
            results[key] = value
    return results, {}, report.passed


def cmd_verify(args, params, cfg):
    kind = args.kind
    tol = {} if args.tol is None else {"tol": args.tol}
    if kind == "all":
        results = suite.run_suite(args.suite, cfg)
        out = {r.name: f"{'pass' if r.passed else 'FAIL'} err={r.error:.3g} tol={r.tol:.0e}" for r in results}
        diagnostics = {"cases": len(results), "failed": sum(not r.passed for r in results)}
        return out, diagnostics, all(r.passed for r in results)
    if kind == "ftc-line":
        _require(args, "f")
        r = line_integrals.verify_ftc_line(line_integrals.PositiveField.parse(args.f, params),
                                           _load_curve(args, params), cfg)
        limit = args.tol if args.tol is not None else 1e-8
        return {"lhs": r.lhs, "rhs": r.rhs, "rel_err": r.rel_err, "tolerance": limit}, {}, r.rel_err <= limit
    if kind == "green":
        _require(args, "f", "g", "rect")
        r = line_integrals.verify_green(line_integrals.PositiveField.parse(args.f, params),
                                        line_integrals.PositiveField.parse(args.g, params),
                                        _parse_rect(args.rect), cfg)
        limit = args.tol if args.tol is not None else 1e-6
        return ({"boundary": r.boundary, "area": r.area, "rel_err": r.rel_err, "tolerance": limit}, {},
                r.rel_err <= limit)
    _require(args, "f")
    curve = _load_curve(args, params)
    if kind == "ftc":
        report = contour.verify_ftc_complex(args.f, curve, cfg, params, **tol)
    elif kind == "closed":
        report = contour.verify_closed(args.f, curve, cfg, params, **tol)
    elif kind == "concat":
        split = args.split if args.split is not None else 0.5 * (curve.t_start + curve.t_end)
        if not curve.t_start < split < curve.t_end:
            raise UsageError(f"--split must lie strictly inside ({curve.t_start}, {curve.t_end})")
        report = contour.verify_concat(args.f, curve, split, cfg, params, **tol)
    elif kind == "product":
        _require(args, "g")
        report = contour.verify_product_division(args.f, args.g, curve, cfg, params, **tol)
    elif kind == "reverse":
        report = contour.verify_reverse(args.f, curve, cfg, params, **tol)
    else:  # power
        _require(args, "n")
        report = contour.verify_power(args.f, curve, args.n, cfg, params, **tol)
    return _verify_report(report)


COMMANDS = {
    "star-deriv": cmd_star_deriv,
    "star-deriv-n": cmd_star_deriv_n,
    "cr-check": cmd_cr_check,
    "line-int": cmd_line_int,
    "double-int": cmd_double_int,
    "complex-int": cmd_complex_int,
    "verify": cmd_verify,
}


# ---------------------------------------------------------------- argv

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _positive_int(text):
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _positive_float(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--f", help="function expression in z (fields: in x and y)")
    common.add_argument("--g", help="second function expression")
    common.add_argument("--param", action="append", metavar="NAME=COMPLEX", help="bind a parameter (repeatable)")
    common.add_argument("--curve", help="curve JSON file or inline JSON")
    common.add_argument("--z", help="evaluation point, e.g. 2+0i")
    common.add_argument("--n", type=int, help="order or power")
    common.add_argument("--branches", type=int, default=2, help="list I*[n] for |n| <= k (default 2)")
    common.add_argument("--tol", type=_positive_float, help="verification or CR tolerance")
    common.add_argument("--quad-tol", type=_positive_float, help="quadrature tolerance on the log-integral")
    common.add_argument("--panels", type=_positive_int)
    common.add_argument("--order", type=_positive_int, help="Gauss-Legendre order")
    common.add_argument("--anchor-offset", type=int, default=0, help="add 2*pi*i*k to the starting log")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--dump-samples", metavar="PATH", help="write t, z, log f samples as CSV")

    parser = _Parser(prog="mulcalc", description="*Derivatives and *integrals of complex functions.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("star-deriv", parents=[common], help="first *derivative at a point")
    sub.add_parser("star-deriv-n", parents=[common], help="n-th *derivative at a point")
    cr = sub.add_parser("cr-check", parents=[common], help="Cauchy-Riemann *condition residuals")
    cr.add_argument("--polar", action="store_true", help="use the polar form at r = |z|, theta = Arg z")
    cr.add_argument("--h", type=_positive_float, help="finite-difference step")
    li = sub.add_parser("line-int", parents=[common], help="line *integral of a positive field")
    li.add_argument("--measure", choices=("ds", "dx", "dy"), default="ds")
    di = sub.add_parser("double-int", parents=[common], help="double *integral on a rectangle")
    di.add_argument("--rect", metavar="X0,X1,Y0,Y1")
    sub.add_parser("complex-int", parents=[common], help="branch-tracked complex *integral family")
    ve = sub.add_parser("verify", parents=[common], help="run a theorem verifier")
    ve.add_argument("kind", choices=VERIFY_KINDS)
    ve.add_argument("--split", type=float, help="split parameter for concat")
    ve.add_argument("--rect", metavar="X0,X1,Y0,Y1")
    ve.add_argument("--suite", default="paper")
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        params = parse_params(args.param)
        cfg = _config(args)
        results, diagnostics, passed = COMMANDS[args.command](args, params, cfg)
        inputs = _inputs(args)
    except (UsageError, UnboundNameError, ValueError, OSError, json.JSONDecodeError) as err:
        print(f"error: {err}", file=stderr)
        return EXIT_USAGE
    except (NumericalError, ex.EvaluationError) as err:
        print(f"numerical failure: {err}", file=stderr)
        return EXIT_NUMERIC
    except MulcalcError as err:
        print(f"error: {err}", file=stderr)
        return EXIT_USAGE
    record = {"format_version": FORMAT_VERSION, "command": args.command, "inputs": inputs,
              "inputs_digest": _digest(inputs), "results": results, "diagnostics": diagnostics}
    if passed is not None:
        record["passed"] = passed
    print(emit_report(record, args.format), file=stdout)
    if passed is False:
        return EXIT_FAIL
    return EXIT_OK


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
