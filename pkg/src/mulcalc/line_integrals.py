"""Line and double *integrals of positive fields in the plane.

Every *integral here is the exponential of an ordinary integral of ln g:
``int_C g^{ds} = exp(int_C ln g ds)`` and likewise for dx, dy and dA.
Convergence is judged on the log-integral, since exponentiating turns an
absolute error there into the same relative error in the result.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import expr as ex
from .curves import Curve, rectangle
from .errors import NonPositiveFieldError
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, integrate, integrate_rect

FD_STEP = 1e-6
IMAG_DUST = 1e-12


@dataclass(frozen=True)
class PositiveField:
    """A real positive function g(x, y) given by an expression.

    ``x`` and ``y`` are parameters of the expression; the variable ``z``,
    if present, is rewritten as ``x + i*y`` at construction.
    """

    expr: ex.Node
    params: tuple = ()

    def __post_init__(self):
        xy = ex.Add(ex.Param("x"), ex.Mul(ex.Lit(1j), ex.Param("y")))
        names = {n.name for n in ex.walk(self.expr) if isinstance(n, ex.Var)}
        object.__setattr__(self, "expr", ex.substitute(self.expr, {n: xy for n in names}))
        object.__setattr__(self, "params", tuple(sorted(dict(self.params).items())))

    @classmethod
    def parse(cls, source, params=None) -> "PositiveField":
        if isinstance(source, PositiveField):
            return source
        return cls(ex.to_expr(source), tuple((params or {}).items()))

    def __call__(self, x, y):
        p = dict(self.params)
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        p.update(x=x, y=y)
        vals = np.asarray(ex.evaluate(self.expr, None, p))
        vals = np.broadcast_to(vals, np.broadcast(x, y).shape)
        bad = (np.abs(vals.imag) > IMAG_DUST * np.maximum(1.0, np.abs(vals.real))) | ~(vals.real > 0)
        if np.any(bad):
            k = np.flatnonzero(bad.ravel())[0]
            xs, ys = np.broadcast_arrays(x, y)
            raise NonPositiveFieldError(
                f"field {ex.render(self.expr)} is not positive at ({xs.ravel()[k]:.6g}, {ys.ravel()[k]:.6g}): "
                f"{complex(vals.ravel()[k])}")
        return vals.real

    def log(self, x, y):
        return np.log(self(x, y))

    def shifted(self, dx: float = 0.0, dy: float = 0.0) -> ex.Node:
        x, y = ex.Param("x"), ex.Param("y")
        return ex.substitute(self.expr, {"x": ex.Add(x, ex.Lit(dx)), "y": ex.Add(y, ex.Lit(dy))})


def star_partial(g: PositiveField, axis: str, h: float = FD_STEP) -> PositiveField:
    """g*_x = exp(d/dx ln g) (or _y), the partial by a central difference."""
    if axis not in ("x", "y"):
        raise ValueError("axis must be 'x' or 'y'")
    plus = g.shifted(**{"d" + axis: h})
    minus = g.shifted(**{"d" + axis: -h})
    slope = ex.Div(ex.Sub(ex.Func("Log", plus), ex.Func("Log", minus)), ex.Lit(2 * h))
    return PositiveField(ex.Func("exp", slope), g.params)


def _weight(dz, measure):
    if measure == "ds":
        return np.abs(dz)
    if measure == "dx":
        return dz.real
    if measure == "dy":
        return dz.imag
    raise ValueError(f"unknown measure {measure!r}")


def line_log_integral(g, curve: Curve, measure: str = "ds", cfg: QuadratureConfig = DEFAULT_CONFIG):
    """int_C ln g d(measure), integrated segment by segment."""
    g = PositiveField.parse(g)
    total = 0.0
    for k in range(len(curve.segments)):
        ta, tb = curve.junctions[k], curve.junctions[k + 1]

        def integrand(t):
            z, dz = curve.evaluate(t)
            return g.log(z.real, z.imag) * _weight(dz, measure)

        total += integrate(integrand, ta, tb, cfg)[0]
    return float(total)


def line_star_ds(g, curve: Curve, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    return math.exp(line_log_integral(g, curve, "ds", cfg))


def line_star_dx(g, curve: Curve, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    return math.exp(line_log_integral(g, curve, "dx", cfg))


def line_star_dy(g, curve: Curve, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    return math.exp(line_log_integral(g, curve, "dy", cfg))


@dataclass(frozen=True)
class Rect:
    x0: float
    x1: float
    y0: float
    y1: float

    def __post_init__(self):
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise ValueError("rectangle needs x0 < x1 and y0 < y1")

    def boundary(self) -> Curve:
        return rectangle(self.x0, self.x1, self.y0, self.y1)


def double_log_integral(g, region: Rect, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    g = PositiveField.parse(g)
    return float(integrate_rect(g.log, region.x0, region.x1, region.y0, region.y1, cfg)[0])


def double_star(g, region: Rect, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    return math.exp(double_log_integral(g, region, cfg))


@dataclass(frozen=True)
class LineFTCReport:
    lhs: float
    rhs: float
    rel_err: float


@dataclass(frozen=True)
class GreenReport:
    boundary: float
    area: float
    rel_err: float


def verify_ftc_line(F, curve: Curve, cfg: QuadratureConfig = DEFAULT_CONFIG) -> LineFTCReport:
    """int_C F*_x^{dx} F*_y^{dy} against F(end) / F(start)."""
    F = PositiveField.parse(F)
    log_lhs = (line_log_integral(star_partial(F, "x"), curve, "dx", cfg)
               + line_log_integral(star_partial(F, "y"), curve, "dy", cfg))
    a, b = curve.start, curve.end
    rhs = float(F(b.real, b.imag) / F(a.real, a.imag))
    lhs = math.exp(log_lhs)
    return LineFTCReport(lhs, rhs, abs(lhs - rhs) / rhs)


def verify_green(f, g, region: Rect, cfg: QuadratureConfig = DEFAULT_CONFIG) -> GreenReport:
    """Closed-boundary product f^{dx} g^{dy} against the double *integral of g*_x / f*_y."""
    f = PositiveField.parse(f)
    g = PositiveField.parse(g)
    boundary_curve = region.boundary()
    boundary = math.exp(line_log_integral(f, boundary_curve, "dx", cfg)
                        + line_log_integral(g, boundary_curve, "dy", cfg))
    quotient = PositiveField(ex.Div(star_partial(g, "x").expr, star_partial(f, "y").expr),
                             f.params + g.params)
    area = double_star(quotient, region, cfg)
    return GreenReport(boundary, area, abs(boundary - area) / area)
