"""Built-in corpus of worked examples and identity checks.

Each case computes one quantity with the library and compares it with a
closed form (or runs one of the verifiers). ``run_suite("paper")`` runs
them all; the CLI exposes this as ``verify all --suite paper``.
"""
from __future__ import annotations

import cmath
import math
import time
from dataclasses import dataclass

from . import contour, curves, derivative, line_integrals
from .quadrature import DEFAULT_CONFIG


@dataclass(frozen=True)
class CaseResult:
    name: str
    passed: bool
    value: object
    expected: object
    error: float
    tol: float
    seconds: float = 0.0


CASES = {}


def case(name, tol):
    def register(fn):
        CASES[name] = (fn, tol)
        return fn
    return register


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


# -------------------------------------------------------------- *derivatives

@case("deriv.constant", 1e-12)
def _ex1(cfg):
    return derivative.star_derivative("c", 1 + 2j, {"c": 3 + 4j}).value, 1


@case("deriv.exp_cz", 1e-12)
def _ex2(cfg):
    c = 1 + 1j
    return derivative.star_derivative("exp(c*z)", 0.4 - 0.2j, {"c": c}).value, cmath.exp(c)


@case("deriv.exp_cz_second_order", 1e-12)
def _ex2n(cfg):
    return derivative.star_derivative_n("exp(c*z)", 0.4 - 0.2j, 2, {"c": 1 + 1j}), 1


@case("deriv.gompertz_fixed_point", 1e-12)
def _ex3(cfg):
    z, p = 0.3 + 0.5j, {"c": 0.5 - 0.25j}
    return derivative.star_derivative_n("exp(c*exp(z))", z, 3, p), cmath.exp(p["c"] * cmath.exp(z))


@case("deriv.identity", 1e-12)
def _ex4(cfg):
    return derivative.star_derivative("z", 2).value, math.exp(0.5)


@case("deriv.identity_second_order", 1e-12)
def _ex4n(cfg):
    return derivative.star_derivative_n("z", 1, 2), math.exp(-1)


@case("deriv.reciprocal_third_order", 1e-12)
def _ex5(cfg):
    return derivative.star_derivative_n("1/z", 1, 3), math.exp(-2)


@case("deriv.log_branch", 1e-12)
def _ex6(cfg):
    z = 2 + 1j
    return derivative.star_derivative("Log(z)", z).value, cmath.exp(1 / (z * cmath.log(z)))


@case("deriv.quadratic_analogue", 1e-12)
def _ex7(cfg):
    z = 1.5 + 0.5j
    return derivative.star_derivative("exp(z*Log(z))", z).value, math.e * z


@case("deriv.quadratic_third_order", 1e-12)
def _ex7n(cfg):
    z = 1.5 + 0.5j
    return derivative.star_derivative_n("exp(z*Log(z))", z, 3), cmath.exp(-1 / z ** 2)


@case("limit.t2_plus_1", 1e-6)
def _limit(cfg):
    _, extrapolated = derivative.star_limit_oracle("t^2+1", 1.0, [1e-2 / 2 ** k for k in range(6)])
    return extrapolated, math.e


@case("cr.exp_cartesian", 1e-6)
def _cr(cfg):
    r = derivative.check_cr("exp(z)", 0.3 + 0.7j, h=1e-5)
    return max(r.residual_modulus, r.residual_argument), 0.0


@case("cr.exp_polar", 1e-6)
def _cr_polar(cfg):
    r = derivative.check_cr_polar("exp(z)", 1.0, 0.5)
    return max(r.residual_1, r.residual_2), 0.0


@case("cr.conj_rejected", 0.0)
def _cr_conj(cfg):
    r = derivative.check_cr("conj(z)", 1 + 1j)
    # error is 0 exactly when conj is rejected with the classic residual near 2
    return float(r.passes or r.residual_classic < 1.9), 0.0


# -------------------------------------------------------------- real *integrals

@case("line.constant_dx", 1e-12)
def _ex8(cfg):
    return line_integrals.line_star_dx("2", curves.line(0, 3 + 1j), cfg), 8.0


@case("line.ftc", 1e-8)
def _thm3(cfg):
    r = line_integrals.verify_ftc_line("exp(x*y)", curves.line(0, 1 + 1j), cfg)
    return r.lhs, r.rhs


@case("line.green_exp_x", 1e-6)
def _thm4(cfg):
    r = line_integrals.verify_green("1", "exp(x)", line_integrals.Rect(0, 1, 0, 1), cfg)
    return r.boundary, r.area


@case("line.green_exp_y", 1e-6)
def _thm4b(cfg):
    r = line_integrals.verify_green("exp(y)", "1", line_integrals.Rect(0, 1, 0, 1), cfg)
    return r.boundary, r.area


# -------------------------------------------------------------- complex *integrals

@case("contour.constant_integer_span", 1e-10)
def _ex9(cfg):
    fam = contour.complex_star_integral("e", curves.line(0, 1), cfg)
    ok = fam.single_valued
    return fam.base if ok else float("nan"), math.e


@case("contour.constant_half_span", 1e-9)
def _ex9b(cfg):
    fam = contour.complex_star_integral("e", curves.line(0, 0.5), cfg)
    if fam.distinct_count != 2:
        return float("nan"), 0
    err = max(_rel(fam.value(0), math.exp(0.5)), _rel(fam.value(1), -math.exp(0.5)))
    return err, 0.0


@case("contour.gompertz_ftc", 1e-8)
def _ex10(cfg):
    r = contour.verify_ftc_complex("exp(c*exp(z))", curves.line(0, 1), cfg, {"c": 0.5})
    return r.lhs, cmath.exp(0.5 * (math.e - 1))


@case("contour.exp_inverse_unit_circle", 1e-8)
def _ex11(cfg):
    fam = contour.complex_star_integral("exp(1/z)", curves.circle(0, 1), cfg)
    return max(abs(fam.value(n) - 1) for n in range(-5, 6)), 0.0


def _report(r):
    return r.rel_err, 0.0


@case("concat.semicircles", 1e-8)
def _thm5(cfg):
    return _report(contour.verify_concat("exp(1/z)", curves.circle(0, 1), 0.0, cfg))


@case("concat.line_split", 1e-10)
def _thm5b(cfg):
    return _report(contour.verify_concat("z", curves.line(1, 3), 0.5, cfg))


@case("product.quarter_arc", 1e-8)
def _thm67(cfg):
    return _report(contour.verify_product_division("z", "z", curves.arc(0, 1, 0, math.pi / 2), cfg))


@case("product.cancellation", 1e-8)
def _thm67b(cfg):
    return _report(contour.verify_product_division("exp(z)", "exp(-z)", curves.line(0.2, 1 + 0.7j), cfg))


@case("reverse.upper_semicircle", 1e-9)
def _thm8(cfg):
    return _report(contour.verify_reverse("exp(1/z)", curves.arc(0, 1, 0, math.pi), cfg))


@case("reverse.line", 1e-10)
def _thm8b(cfg):
    return _report(contour.verify_reverse("z", curves.line(1, 2), cfg))


@case("power.quarter_arc_square", 1e-8)
def _thm9(cfg):
    return _report(contour.verify_power("z", curves.arc(0, 1, 0, math.pi / 2), 2, cfg))


@case("power.n0_n1_n3", 1e-8)
def _thm9b(cfg):
    arc = curves.arc(0, 1.5, -0.3, 2.0)
    return max(contour.verify_power("z+1", arc, n, cfg).rel_err for n in (0, 1, 3)), 0.0


@case("ftc.exp_cz", 1e-8)
def _thm10(cfg):
    c = 2 - 1j
    r = contour.verify_ftc_complex("exp(c*z)", curves.line(1, 1j), cfg, {"c": c})
    return r.lhs, cmath.exp(c * (1j - 1))


@case("closed.identity_circle", 1e-8)
def _cor1(cfg):
    return contour.verify_closed("z", curves.circle(0, 1), cfg).abs_err, 0.0


@case("closed.exp_rectangle", 1e-8)
def _cor1b(cfg):
    return contour.verify_closed("exp(c*z)", curves.rectangle(-1, 2, -0.5, 1), cfg, {"c": 0.7 + 0.2j}).abs_err, 0.0


@case("closed.reciprocal_radius2", 1e-8)
def _cor1c(cfg):
    return contour.verify_closed("1/z", curves.circle(0, 2), cfg).abs_err, 0.0


@case("partition.independence", 1e-10)
def _partition(cfg):
    f, c = "exp(1/z)+2", curves.circle(0.3, 1.2)
    part = curves.half_plane_partition(f, c)
    a = contour.complex_star_integral(f, c, cfg, partition=part)
    b = contour.complex_star_integral(f, c, cfg, partition=curves.refine_partition(part, f, c, 3))
    return b.base, a.base


SUITES = {"paper": tuple(CASES)}


def run_case(name, cfg=DEFAULT_CONFIG) -> CaseResult:
    fn, tol = CASES[name]
    start = time.perf_counter()
    value, expected = fn(cfg)
    err = _rel(value, expected) if expected != 0 else abs(value)
    passed = bool(err <= tol) if not math.isnan(err) else False
    return CaseResult(name, passed, value, expected, float(err), tol, time.perf_counter() - start)


def run_suite(suite: str = "paper", cfg=DEFAULT_CONFIG) -> list:
    if suite not in SUITES:
        raise KeyError(f"unknown suite {suite!r}; known: {', '.join(SUITES)}")
    return [run_case(name, cfg) for name in SUITES[suite]]
