"""Branch-tracked complex *integrals along piecewise-smooth curves.

The complex *integral of a nowhere-vanishing f along C is the family

    I*_n = exp(2*pi*i*n*(z(b) - z(a))) * I*_0,    I*_0 = exp(int_C g(z) dz),

where g is a continuous logarithm of f along C. g is built piece by piece
over a half-plane partition: on piece k, g = g(t_{k-1}) + Log(f / f(z(t_{k-1}))),
which is continuous because every value on the piece lies in one open half
plane. The first anchor g(a) is the principal Log f(z(a)) unless the caller
supplies another logarithm of f(z(a)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import expr as ex
from .curves import Curve, HalfPlanePartition, half_plane_partition
from .derivative import star_expression
from .errors import CurveError, PartitionError, ZeroOfFunctionError
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, integrate

EPS_ZERO = 1e-12
TWO_PI_I = 2j * math.pi
SINGLE_VALUED_TOL = 1e-9
MAX_DENOMINATOR = 64
BRANCH_RANGE = 5
COUNTABLY_INFINITE = "countably infinite"


@dataclass(frozen=True, eq=False)
class BranchPath:
    """Continuous log f(z(t)) at sample nodes, plus the per-piece branch data."""

    times: np.ndarray
    logf: np.ndarray
    anchor: complex
    partition: HalfPlanePartition
    piece_anchors: tuple  # g(t_{k-1}) for each piece
    piece_values: tuple  # f(z(t_{k-1})) for each piece

    @property
    def terminal(self) -> complex:
        return complex(self.logf[-1])

    def log_on_piece(self, k: int, values):
        """Continuous log of ``values`` taken on piece k of the partition."""
        ratio = np.asarray(values) / self.piece_values[k]
        steps = np.angle(ratio)
        # values were certified within pi/2 of the piece start; allow slack
        # for quadrature nodes that fall between certification samples
        if np.any(np.abs(steps) >= 0.75 * math.pi):
            raise PartitionError(f"value left the certified half plane on piece {k}")
        return self.piece_anchors[k] + np.log(np.abs(ratio)) + 1j * steps


def _values_on_curve(f, curve, t, params):
    vals = np.atleast_1d(ex.evaluate(f, curve.point(t), params))
    if np.any(np.abs(vals) <= EPS_ZERO):
        raise ZeroOfFunctionError(f"zero on curve: |f| <= {EPS_ZERO}")
    return vals


def _initial_anchor(fa: complex, anchor, anchor_offset: int) -> complex:
    if anchor is None:
        return complex(ex.principal_log(fa)) + TWO_PI_I * anchor_offset
    anchor = complex(anchor)
    if abs(np.exp(anchor) - fa) > 1e-9 * abs(fa):
        raise ValueError(f"anchor {anchor} is not a logarithm of f(z(a)) = {fa}")
    return anchor + TWO_PI_I * anchor_offset


def track_log(f, curve: Curve, cfg: QuadratureConfig = DEFAULT_CONFIG, params=None, anchor=None,
              anchor_offset: int = 0, partition: HalfPlanePartition | None = None,
              nodes_per_piece: int = 64) -> BranchPath:
    """Continuous branch of log f along the curve."""
    f = ex.to_expr(f)
    if partition is None:
        partition = half_plane_partition(f, curve, params=params)
    times, logs, anchors, starts = [], [], [], []
    current = None
    for k, (tl, tr, _) in enumerate(partition.pieces()):
        ts = np.linspace(tl, tr, nodes_per_piece + 1)
        vals = _values_on_curve(f, curve, ts, params)
        if current is None:
            current = _initial_anchor(complex(vals[0]), anchor, anchor_offset)
        anchors.append(current)
        starts.append(complex(vals[0]))
        ratio = vals / vals[0]
        steps = np.angle(ratio)
        if np.any(np.abs(steps) >= 0.75 * math.pi):
            raise PartitionError(f"piece {k} is not contained in a half plane")
        piece_log = current + np.log(np.abs(ratio)) + 1j * steps
        skip = 1 if k else 0
        times.append(ts[skip:])
        logs.append(piece_log[skip:])
        current = complex(piece_log[-1])
    return BranchPath(np.concatenate(times), np.concatenate(logs), anchors[0], partition,
                      tuple(anchors), tuple(starts))


def distinct_count(delta_z: complex):
    """Number of distinct members of the family for a given z(b) - z(a).

    Integer -> 1; reduced rational p/q (q <= 64) -> q; otherwise infinite.
    """
    delta_z = complex(delta_z)
    if abs(delta_z.imag) > SINGLE_VALUED_TOL:
        return COUNTABLY_INFINITE
    x = delta_z.real
    frac = Fraction(x).limit_denominator(MAX_DENOMINATOR)
    if abs(x - frac) <= SINGLE_VALUED_TOL:
        return frac.denominator
    return COUNTABLY_INFINITE


@dataclass(frozen=True)
class MultiValueIntegral:
    base: complex  # I*_0
    winding: complex  # W = exp(2*pi*i*delta_z)
    delta_z: complex
    single_valued: bool
    distinct_count: object  # int or COUNTABLY_INFINITE
    log_base: complex  # the integral of g dz whose exponential is base
    pieces: int
    rounds: int
    path: BranchPath = field(repr=False, compare=False)

    def value(self, n: int) -> complex:
        return self.winding ** n * self.base

    def values(self, n_range) -> dict:
        return {n: self.value(n) for n in n_range}


def complex_star_integral(f, curve: Curve, cfg: QuadratureConfig = DEFAULT_CONFIG, params=None,
                          anchor=None, anchor_offset: int = 0,
                          partition: HalfPlanePartition | None = None) -> MultiValueIntegral:
    """The family I*_n of the complex *integral of f along the curve.

    Each certified piece is integrated separately (also split at segment
    junctions, where z' may jump) with Gauss-Legendre panel doubling.
    """
    f = ex.to_expr(f)
    path = track_log(f, curve, cfg, params, anchor, anchor_offset, partition)
    junctions = np.asarray(curve.junctions)
    total = 0j
    rounds = 0
    for k, (tl, tr, _) in enumerate(path.partition.pieces()):
        inner = junctions[(junctions > tl) & (junctions < tr)]
        edges = np.concatenate(([tl], inner, [tr]))

        def integrand(t, k=k):
            z, dz = curve.evaluate(t)
            vals = np.atleast_1d(ex.evaluate(f, z, params))
            if np.any(np.abs(vals) <= EPS_ZERO):
                raise ZeroOfFunctionError(f"zero on curve: |f| <= {EPS_ZERO}")
            return path.log_on_piece(k, vals) * dz

        for a, b in zip(edges[:-1], edges[1:]):
            value, r = integrate(integrand, float(a), float(b), cfg)
            total += value
            rounds = max(rounds, r)
    # closed within the join tolerance means W is exactly 1
    delta_z = 0j if curve.closed else complex(curve.end - curve.start)
    count = distinct_count(delta_z)
    return MultiValueIntegral(
        base=complex(np.exp(total)),
        winding=complex(np.exp(TWO_PI_I * delta_z)),
        delta_z=delta_z,
        single_valued=count == 1,
        distinct_count=count,
        log_base=complex(total),
        pieces=len(path.partition),
        rounds=rounds,
        path=path,
    )


def riemann_product(f, curve: Curve, nodes: int = 100_000, params=None) -> complex:
    """Direct integral product exp(sum L(f(zeta_k)) * dz_k) on a uniform grid.

    The log is continued by cumulative principal-argument steps from
    Log f(z(a)); zeta_k are parameter midpoints. Independent of the
    partition and of the quadrature path.
    """
    f = ex.to_expr(f)
    t = np.linspace(curve.t_start, curve.t_end, nodes + 1)
    zk = curve.point(t)
    mids = curve.point(0.5 * (t[:-1] + t[1:]))
    fa = ex.evaluate(f, curve.start, params)
    vals = np.concatenate(([fa], np.atleast_1d(ex.evaluate(f, mids, params))))
    if np.any(np.abs(vals) <= EPS_ZERO):
        raise ZeroOfFunctionError("zero on curve")
    steps = np.angle(vals[1:] / vals[:-1])
    if np.any(np.abs(steps) >= math.pi / 2):
        raise PartitionError("grid too coarse to unwrap arg f; use more nodes")
    logs = complex(ex.principal_log(fa)) + np.log(np.abs(vals[1:] / fa)) + 1j * np.cumsum(steps)
    return complex(np.exp(np.sum(logs * np.diff(zk))))


def line_integral_decomposition(f, curve: Curve, cfg: QuadratureConfig = DEFAULT_CONFIG,
                                params=None, path: BranchPath | None = None) -> complex:
    """log I*_0 rebuilt from four real line integrals per certified piece.

    Real part: int ln R dx - int Theta dy; imaginary part:
    int Theta dx + int ln R dy, with R = |f| and Theta the tracked argument.
    Each is computed as the log of a line *integral of a positive field.
    """
    from .line_integrals import PositiveField, line_log_integral

    f = ex.to_expr(f)
    path = path or track_log(f, curve, cfg, params)
    frozen = tuple((params or {}).items())
    re_part = im_part = 0.0
    for k, (tl, tr, _) in enumerate(path.partition.pieces()):
        piece = curve.subcurve(tl, tr)
        theta0 = path.piece_anchors[k].imag
        modulus = PositiveField(ex.Func("abs", f), frozen)
        ratio = ex.Div(f, ex.Lit(path.piece_values[k]))
        e_theta = PositiveField(
            ex.Func("exp", ex.Add(ex.Func("im", ex.Func("Log", ratio)), ex.Lit(theta0))), frozen)
        re_part += line_log_integral(modulus, piece, "dx", cfg) - line_log_integral(e_theta, piece, "dy", cfg)
        im_part += line_log_integral(e_theta, piece, "dx", cfg) + line_log_integral(modulus, piece, "dy", cfg)
    return complex(re_part, im_part)


# ---------------------------------------------------------------- verifiers

@dataclass(frozen=True)
class VerificationReport:
    name: str
    lhs: object
    rhs: object
    abs_err: float
    rel_err: float
    matched_branch: int | None
    passed: bool
    tol: float
    details: dict = field(default_factory=dict, compare=False)


def _rel(a: complex, b: complex) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def _best_branch(family: MultiValueIntegral, target: complex, branch_range: int):
    errs = [(_rel(family.value(n), target), abs(n), n) for n in range(-branch_range, branch_range + 1)]
    err, _, n = min(errs)
    return n, err


def verify_ftc_complex(f, curve: Curve, cfg: QuadratureConfig = DEFAULT_CONFIG, params=None,
                       tol: float = 1e-8, branch_range: int = BRANCH_RANGE) -> VerificationReport:
    """Some member of the *integral family of f* equals f(z(b)) / f(z(a))."""
    f = ex.to_expr(f)
    family = complex_star_integral(star_expression(f), curve, cfg, params)
    fa = ex.evaluate(f, curve.start, params)
    fb = ex.evaluate(f, curve.end, params)
    if min(abs(fa), abs(fb)) <= EPS_ZERO:
        raise ZeroOfFunctionError("f vanishes at an end point")
    target = fb / fa
    n, err = _best_branch(family, target, branch_range)
    lhs = family.value(n)
    return VerificationReport("ftc", lhs, target, abs(lhs - target), err, n, err <= tol, tol,
                              {"family": family})


def verify_closed(f, curve: Curve, cfg: QuadratureConfig = DEFAULT_CONFIG, params=None,
                  tol: float = 1e-8) -> VerificationReport:
    """The closed-curve *integral of f* is the single value 1."""
    if not curve.closed:
        raise CurveError("verify_closed needs a closed curve")
    family = complex_star_integral(star_expression(f), curve, cfg, params)
    abs_err = abs(family.base - 1)
    winding_ok = abs(family.winding - 1) <= 1e-12
    return VerificationReport("closed", family.base, 1 + 0j, abs_err, abs_err, 0,
                              abs_err <= tol and winding_ok, tol, {"family": family})


def verify_concat(f, curve: Curve, split_t: float, cfg: QuadratureConfig = DEFAULT_CONFIG,
                  params=None, tol: float = 1e-8, n_range=range(-2, 3)) -> VerificationReport:
    """I*_n(C) = I*_n(C1) I*_n(C2) with C2 anchored where C1's log ends."""
    f = ex.to_expr(f)
    whole = complex_star_integral(f, curve, cfg, params)
    c1, c2 = curve.split(split_t)
    first = complex_star_integral(f, c1, cfg, params)
    second = complex_star_integral(f, c2, cfg, params, anchor=first.path.terminal)
    lhs = [whole.value(n) for n in n_range]
    rhs = [first.value(n) * second.value(n) for n in n_range]
    errs = [_rel(a, b) for a, b in zip(lhs, rhs)]
    abs_errs = [abs(a - b) for a, b in zip(lhs, rhs)]
    return VerificationReport("concat", lhs, rhs, max(abs_errs), max(errs), None, max(errs) <= tol, tol,
                              {"whole": whole, "first": first, "second": second})


def _branch_offset(lhs_base: complex, rhs_base: complex, winding: complex, branch_range: int):
    errs = [(_rel(lhs_base, winding ** k * rhs_base), abs(k), k) for k in range(-branch_range, branch_range + 1)]
    err, _, k = min(errs)
    return k, err


def verify_product_division(f, g, curve: Curve, cfg: QuadratureConfig = DEFAULT_CONFIG, params=None,
                            tol: float = 1e-8, branch_range: int = BRANCH_RANGE) -> VerificationReport:
    """Product and quotient rules up to a winding offset W^k, |k| <= branch_range.

    ``matched_branch`` is the product offset; the division offset and
    error are in ``details``. Passing requires both.
    """
    f, g = ex.to_expr(f), ex.to_expr(g)
    If = complex_star_integral(f, curve, cfg, params)
    Ig = complex_star_integral(g, curve, cfg, params)
    Ifg = complex_star_integral(ex.Mul(f, g), curve, cfg, params)
    Iq = complex_star_integral(ex.Div(f, g), curve, cfg, params)
    w = If.winding
    k, err = _branch_offset(Ifg.base, If.base * Ig.base, w, branch_range)
    kq, errq = _branch_offset(Iq.base, If.base / Ig.base, w, branch_range)
    lhs, rhs = Ifg.base, w ** k * If.base * Ig.base
    return VerificationReport("product_division", lhs, rhs, abs(lhs - rhs), err, k,
                              err <= tol and errq <= tol, tol,
                              {"division_branch": kq, "division_rel_err": errq,
                               "division_lhs": Iq.base, "division_rhs": w ** kq * If.base / Ig.base})


def verify_reverse(f, curve: Curve, cfg: QuadratureConfig = DEFAULT_CONFIG, params=None,
                   tol: float = 1e-9, n_range=range(-2, 3)) -> VerificationReport:
    """I*_n(C) * I*_n(-C) = 1, -C anchored at the forward path's terminal log."""
    f = ex.to_expr(f)
    forward = complex_star_integral(f, curve, cfg, params)
    backward = complex_star_integral(f, curve.reverse(), cfg, params, anchor=forward.path.terminal)
    products = [forward.value(n) * backward.value(n) for n in n_range]
    errs = [abs(p - 1) for p in products]
    return VerificationReport("reverse", products, [1 + 0j] * len(products), max(errs), max(errs), None,
                              max(errs) <= tol, tol, {"forward": forward, "backward": backward})


def verify_power(f, curve: Curve, n: int, cfg: QuadratureConfig = DEFAULT_CONFIG, params=None,
                 tol: float = 1e-8, m_range=range(-2, 3)) -> VerificationReport:
    """(int f^{dz})^n is contained in int (f^n)^{dz}, checked member by member."""
    if n < 0:
        raise ValueError("power must be a natural number (0 allowed)")
    f = ex.to_expr(f)
    base = complex_star_integral(f, curve, cfg, params)
    powered = complex_star_integral(ex.Pow(f, n), curve, cfg, params)
    reach = 5 * n + 5
    matches, errs = [], []
    for m in m_range:
        target = base.value(m) ** n
        found = min((_rel(powered.value(mp), target), abs(mp), mp) for mp in range(-reach, reach + 1))
        errs.append(found[0])
        matches.append(found[2])
    lhs = [base.value(m) ** n for m in m_range]
    rhs = [powered.value(mp) for mp in matches]
    return VerificationReport("power", lhs, rhs, max(abs(a - b) for a, b in zip(lhs, rhs)), max(errs),
                              matches[len(matches) // 2], max(errs) <= tol, tol,
                              {"matches": dict(zip(m_range, matches)), "base": base, "powered": powered})
