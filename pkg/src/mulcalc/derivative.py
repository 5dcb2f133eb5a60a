"""Multiplicative derivatives of complex functions and Cauchy-Riemann *checks.

The *derivative of a nowhere-vanishing holomorphic f is
``f*(z) = exp(f'(z) / f(z))``; the n-th one is ``exp([f'/f]^(n-1)(z))``.
Both are computed from symbolic derivatives, so no finite-difference error
enters. :func:`star_limit_oracle` is the independent check: it evaluates the
defining limit ``(f(t+h)/f(t))^(1/h)`` on the principal branch.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import expr as ex
from .errors import BranchCrossingError, ZeroOfFunctionError

EPS_ZERO = 1e-12
DEFAULT_TOL = 1e-6


@dataclass(frozen=True)
class StarDerivativeResult:
    value: complex
    f_value: complex
    logderiv: complex  # f'(z) / f(z)


def _f_nonzero(f, z, params):
    fz = ex.evaluate(f, z, params)
    if abs(fz) <= EPS_ZERO:
        raise ZeroOfFunctionError(f"*derivative undefined at zero of f (|f({z})| = {abs(fz):.3g})")
    return fz


def logarithmic_derivative(f) -> ex.Node:
    """The expression f'/f (valid on every branch of log f)."""
    f = ex.to_expr(f)
    return ex.simplify(ex.Div(ex.differentiate(f), f))


def star_expression(f) -> ex.Node:
    """f* = exp(f'/f) as an expression, ready to be integrated."""
    return ex.Func("exp", logarithmic_derivative(f))


def star_derivative(f, z: complex, params=None) -> StarDerivativeResult:
    f = ex.to_expr(f)
    df = ex.differentiate(f)
    fz = _f_nonzero(f, z, params)
    ld = ex.evaluate(df, z, params) / fz
    return StarDerivativeResult(value=complex(np.exp(ld)), f_value=fz, logderiv=complex(ld))


def star_derivative_n(f, z: complex, n: int, params=None) -> complex:
    if n < 1:
        raise ValueError("order n must be a positive integer")
    f = ex.to_expr(f)
    _f_nonzero(f, z, params)
    g = logarithmic_derivative(f)
    for _ in range(n - 1):
        g = ex.differentiate(g)
    return complex(np.exp(ex.evaluate(g, z, params)))


def _neville_at_zero(hs, values):
    """Polynomial extrapolation of values(h) to h = 0 (Richardson, any h grid)."""
    p = [complex(v) for v in values]
    hs = list(hs)
    n = len(p)
    for m in range(1, n):
        for i in range(n - m):
            p[i] = (hs[i + m] * p[i] - hs[i] * p[i + 1]) / (hs[i + m] - hs[i])
    return p[0]


def star_limit_oracle(f, t: float, h_list, params=None):
    """Evaluate ``(f(t+h)/f(t))^(1/h)`` with the principal power for each h.

    Returns ``(values, extrapolated)``. Extrapolation acts on the exponents
    Log(ratio)/h, which are smooth in h, and is exponentiated at the end.
    Source strings are parsed with ``t`` as the (real) variable.
    """
    f = ex.to_expr(f, variable="t")
    hs = [float(h) for h in h_list]
    if not hs or any(h == 0 for h in hs):
        raise ValueError("h_list must contain nonzero steps")
    ft = _f_nonzero(f, complex(t), params)
    exponents = []
    for h in hs:
        ratio = ex.evaluate(f, complex(t + h), params) / ft
        if ratio == 0:
            raise ZeroOfFunctionError(f"f vanishes at t+h = {t + h}")
        arg = math.atan2(ratio.imag, ratio.real)
        if abs(arg) >= math.pi / 2:
            raise BranchCrossingError(
                f"f(t+h)/f(t) has argument {arg:.3f} for h={h}; the principal power is "
                "unreliable near the negative real axis, use a smaller h")
        exponents.append(complex(math.log(abs(ratio)), arg) / h)
    values = [complex(np.exp(e)) for e in exponents]
    extrapolated = complex(np.exp(_neville_at_zero(hs, exponents)))
    return values, extrapolated


# ---------------------------------------------------------------- CR *conditions

@dataclass(frozen=True)
class CRReport:
    point: complex
    h: float
    residual_modulus: float  # |[ln R]'_x - Theta'_y|
    residual_argument: float  # |[ln R]'_y + Theta'_x|
    residual_classic: float  # max(|u'_x - v'_y|, |u'_y + v'_x|)
    tol: float
    passes: bool


@dataclass(frozen=True)
class PolarCRReport:
    r: float
    theta: float
    h: float
    residual_1: float  # |Theta'_theta - r [ln R]'_r|
    residual_2: float  # |[ln R]'_theta + r Theta'_r|
    tol: float
    passes: bool


def _log_on_stencil(f, center, points, params):
    """ln R and a continuous Theta at stencil points, unwrapped against f(center)."""
    f0 = ex.evaluate(f, center, params)
    vals = np.asarray(ex.evaluate(f, np.asarray(points), params))
    if abs(f0) <= EPS_ZERO or np.any(np.abs(vals) <= EPS_ZERO):
        raise ZeroOfFunctionError("f vanishes on the difference stencil")
    theta0 = math.atan2(f0.imag, f0.real)
    theta = theta0 + np.angle(vals / f0)
    return np.log(np.abs(vals)), theta, vals


def default_step(z: complex) -> float:
    return 1e-5 * max(1.0, abs(z))


def check_cr(f, z: complex, h: float | None = None, tol: float = DEFAULT_TOL, params=None) -> CRReport:
    """Central-difference residuals of the CR *conditions at z.

    Stencil order is z+h, z-h, z+ih, z-ih.
    """
    f = ex.to_expr(f)
    z = complex(z)
    h = default_step(z) if h is None else float(h)
    pts = [z + h, z - h, z + 1j * h, z - 1j * h]
    lnR, theta, vals = _log_on_stencil(f, z, pts, params)
    lnR_x = (lnR[0] - lnR[1]) / (2 * h)
    lnR_y = (lnR[2] - lnR[3]) / (2 * h)
    th_x = (theta[0] - theta[1]) / (2 * h)
    th_y = (theta[2] - theta[3]) / (2 * h)
    fx = (vals[0] - vals[1]) / (2 * h)
    fy = (vals[2] - vals[3]) / (2 * h)
    classic = max(abs(fx.real - fy.imag), abs(fy.real + fx.imag))
    res_mod = float(abs(lnR_x - th_y))
    res_arg = float(abs(lnR_y + th_x))
    return CRReport(z, h, res_mod, res_arg, float(classic), tol, max(res_mod, res_arg) <= tol)


def check_cr_polar(f, r: float, theta: float, h: float | None = None, tol: float = DEFAULT_TOL,
                   params=None) -> PolarCRReport:
    f = ex.to_expr(f)
    h = default_step(r) if h is None else float(h)
    if not r > h > 0:
        raise ValueError("need r > h > 0")
    z = r * np.exp(1j * theta)
    pts = [(r + h) * np.exp(1j * theta), (r - h) * np.exp(1j * theta),
           r * np.exp(1j * (theta + h)), r * np.exp(1j * (theta - h))]
    lnR, th, _ = _log_on_stencil(f, complex(z), pts, params)
    lnR_r = (lnR[0] - lnR[1]) / (2 * h)
    th_r = (th[0] - th[1]) / (2 * h)
    lnR_t = (lnR[2] - lnR[3]) / (2 * h)
    th_t = (th[2] - th[3]) / (2 * h)
    res1 = float(abs(th_t - r * lnR_r))
    res2 = float(abs(lnR_t + r * th_r))
    return PolarCRReport(float(r), float(theta), h, res1, res2, tol, max(res1, res2) <= tol)
