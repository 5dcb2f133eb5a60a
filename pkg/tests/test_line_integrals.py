import math

import numpy as np
import pytest

from mulcalc import curves as cv
from mulcalc import line_integrals as li
from mulcalc.errors import NonPositiveFieldError

SQUARE = li.Rect(0, 1, 0, 1)
CURVES = [
    cv.line(0, 3 + 1j),
    cv.polygon([0.2, 1 + 0.5j, -0.3 + 1.2j]),
    cv.arc(0.5, 0.8, -1.0, 2.0),
    cv.curve_from_spec({"segments": [{"kind": "expr", "x": "t", "y": "sin(t)", "t": [0, 2]}]}),
]
FIELDS = ["exp(x)", "1+x^2+y^2", "exp(x*y)", "2+cos(x)*sin(y)"]


def _riemann_log(g, curve, measure, n=200_000):
    """Midpoint-rule oracle for the log of a line *integral."""
    t = np.linspace(curve.t_start, curve.t_end, n + 1)
    mid = 0.5 * (t[:-1] + t[1:])
    z, dz = curve.evaluate(mid)
    w = {"ds": np.abs(dz), "dx": dz.real, "dy": dz.imag}[measure] * np.diff(t)
    return float(np.sum(np.log(li.PositiveField.parse(g)(z.real, z.imag)) * w))


def test_line_star_ds_examples():
    assert li.line_star_ds("1", CURVES[1]) == 1
    assert li.line_star_ds("2", cv.line(0, 7)) == pytest.approx(128, rel=1e-12)
    assert li.line_star_ds("exp(x)", cv.line(0, 1)) == pytest.approx(math.exp(0.5), rel=1e-12)


def test_constant_dx_is_power_of_span():
    c = cv.polygon([0, 1 + 2j, 3 - 1j])
    assert li.line_star_dx("2", c) == pytest.approx(8, rel=1e-12)
    assert li.line_star_dy("3", c) == pytest.approx(3 ** -1, rel=1e-12)


@pytest.mark.parametrize("g", FIELDS)
@pytest.mark.parametrize("k", range(len(CURVES)))
@pytest.mark.parametrize("measure", ["ds", "dx", "dy"])
def test_against_riemann_oracle(g, k, measure):
    curve = CURVES[k]
    assert li.line_log_integral(g, curve, measure) == pytest.approx(_riemann_log(g, curve, measure), abs=1e-8)


@pytest.mark.parametrize("k", range(len(CURVES)))
def test_orientation(k):
    c = CURVES[k]
    g = "1+x^2+y^2"
    assert li.line_star_dx(g, c.reverse()) == pytest.approx(1 / li.line_star_dx(g, c), rel=1e-10)
    assert li.line_star_dy(g, c.reverse()) == pytest.approx(1 / li.line_star_dy(g, c), rel=1e-10)
    assert li.line_star_ds(g, c.reverse()) == pytest.approx(li.line_star_ds(g, c), rel=1e-10)


@pytest.mark.parametrize("p", [-1, 2, 0.5])
def test_power_rule(p):
    c = CURVES[1]
    gp = f"exp({p}*Log(1+x^2+y^2))"
    assert li.line_star_dx(gp, c) == pytest.approx(li.line_star_dx("1+x^2+y^2", c) ** p, rel=1e-9)


def test_multiplicativity_and_additivity():
    c = CURVES[2]
    f, g = "exp(x)", "2+cos(x)*sin(y)"
    for fn in (li.line_star_ds, li.line_star_dx, li.line_star_dy):
        assert fn(f"({f})*({g})", c) == pytest.approx(fn(f, c) * fn(g, c), rel=1e-9)
        assert fn(f"({f})/({g})", c) == pytest.approx(fn(f, c) / fn(g, c), rel=1e-9)
        a, b = c.split(0.3)
        assert fn(g, c) == pytest.approx(fn(g, a) * fn(g, b), rel=1e-10)


def test_double_star():
    assert li.double_star("1", SQUARE) == 1
    assert li.double_star("3", SQUARE) == pytest.approx(3, rel=1e-12)
    assert li.double_star("exp(x*y)", SQUARE) == pytest.approx(math.exp(0.25), rel=1e-12)
    left, right = li.Rect(0, 0.4, 0, 1), li.Rect(0.4, 1, 0, 1)
    g = "1+x^2*y"
    assert li.double_star(g, SQUARE) == pytest.approx(li.double_star(g, left) * li.double_star(g, right), rel=1e-10)


def test_ftc_line():
    assert li.verify_ftc_line("5", CURVES[1]).rel_err == 0
    r = li.verify_ftc_line("exp(x*y)", cv.line(0, 1 + 1j))
    assert r.rhs == pytest.approx(math.e) and r.rel_err <= 1e-8
    closed = li.verify_ftc_line("1+x^2+y^2", cv.rectangle(0, 1, 0, 2))
    assert closed.lhs == pytest.approx(1, abs=1e-8)


def test_green_examples():
    r = li.verify_green("1", "1", SQUARE)
    assert r.boundary == r.area == 1
    r = li.verify_green("1", "exp(x)", SQUARE)
    assert r.area == pytest.approx(math.e, rel=1e-6) and r.rel_err <= 1e-6
    r = li.verify_green("exp(y)", "1", SQUARE)
    assert r.area == pytest.approx(math.exp(-1), rel=1e-6) and r.rel_err <= 1e-6


def test_nonpositive_field():
    with pytest.raises(NonPositiveFieldError):
        li.line_star_ds("x", cv.line(-1, 1))
    with pytest.raises(NonPositiveFieldError):
        li.line_star_ds("1+i", cv.line(0, 1))
    with pytest.raises(ValueError):
        li.Rect(1, 0, 0, 1)


def test_field_accepts_z():
    f = li.PositiveField.parse("abs(z)^2+1")
    assert f(1.0, 2.0) == pytest.approx(6)
