"""Piecewise-smooth parametric curves and half-plane partitions along them.

A :class:`Curve` is an ordered tuple of segments. Every segment carries its
own parameter interval; the curve's global parameter runs through the
segments back to back starting at the first segment's local start. So the
unit circle given as an arc over theta in [-pi, pi] is parametrized by the
angle itself.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import jsonschema
import numpy as np

from . import expr as ex
from .errors import CurveError, PartitionError, ZeroOfFunctionError
from .quadrature import DEFAULT_CONFIG, QuadratureConfig, integrate

EPS_ZERO = 1e-12
JOIN_TOL = 1e-12
ARG_MARGIN = 1e-9  # keeps exact quarter-turn pieces out


def _close(a: complex, b: complex) -> bool:
    return abs(a - b) <= JOIN_TOL * max(1.0, abs(a), abs(b))


@dataclass(frozen=True)
class LineSegment:
    start: complex
    end: complex
    s0: float = 0.0
    s1: float = 1.0

    kind = "line"

    @property
    def domain(self):
        return (self.s0, self.s1)

    def point(self, s):
        u = (np.asarray(s, dtype=float) - self.s0) / (self.s1 - self.s0)
        return self.start + u * (self.end - self.start)

    def tangent(self, s):
        d = (self.end - self.start) / (self.s1 - self.s0)
        return np.full(np.shape(s), d, dtype=complex)

    def reversed(self):
        return LineSegment(self.end, self.start, self.s0, self.s1)

    def split(self, s):
        p = complex(self.point(s))
        return LineSegment(self.start, p, self.s0, s), LineSegment(p, self.end, s, self.s1)

    def validate(self):
        if not self.s0 < self.s1:
            raise CurveError("line segment needs s0 < s1")
        if self.start == self.end:
            raise CurveError("zero-length line segment")

    def to_spec(self):
        return {"kind": "line", "from": [self.start.real, self.start.imag],
                "to": [self.end.real, self.end.imag]}


@dataclass(frozen=True)
class ArcSegment:
    """Circular arc center + radius*e^{i*theta}, theta from theta0 to theta1.

    theta1 < theta0 traces the arc clockwise. The local parameter is the
    angle for counter-clockwise arcs and its mirror image otherwise.
    """

    center: complex
    radius: float
    theta0: float
    theta1: float

    kind = "arc"

    @property
    def domain(self):
        return (min(self.theta0, self.theta1), max(self.theta0, self.theta1))

    @property
    def _direction(self):
        return 1.0 if self.theta1 > self.theta0 else -1.0

    def _angle(self, s):
        s = np.asarray(s, dtype=float)
        return s if self._direction > 0 else self.theta0 + self.theta1 - s

    def point(self, s):
        return self.center + self.radius * np.exp(1j * self._angle(s))

    def tangent(self, s):
        return self._direction * 1j * self.radius * np.exp(1j * self._angle(s))

    def reversed(self):
        return ArcSegment(self.center, self.radius, self.theta1, self.theta0)

    def split(self, s):
        mid = float(self._angle(s))
        return (ArcSegment(self.center, self.radius, self.theta0, mid),
                ArcSegment(self.center, self.radius, mid, self.theta1))

    def validate(self):
        if not self.radius > 0:
            raise CurveError("arc radius must be positive")
        if self.theta0 == self.theta1:
            raise CurveError("zero-length arc segment")

    def to_spec(self):
        return {"kind": "arc", "center": [self.center.real, self.center.imag],
                "radius": self.radius, "theta": [self.theta0, self.theta1]}


@dataclass(frozen=True)
class ExprSegment:
    """z(t) = x(t) + i*y(t) from two real-variable expressions in ``t``.

    ``flipped`` runs the same parametrization backwards; derivatives come
    from central differences with step span*1e-7.
    """

    x: ex.Node
    y: ex.Node
    t0: float
    t1: float
    flipped: bool = False
    params: tuple = ()

    kind = "expr"

    @property
    def domain(self):
        return (self.t0, self.t1)

    def _raw(self, u):
        p = dict(self.params)
        xv = ex.evaluate(self.x, np.asarray(u, dtype=float), p)
        yv = ex.evaluate(self.y, np.asarray(u, dtype=float), p)
        return np.real(xv) + 1j * np.real(yv)

    def _u(self, s):
        s = np.asarray(s, dtype=float)
        return self.t0 + self.t1 - s if self.flipped else s

    def point(self, s):
        return self._raw(self._u(s))

    def tangent(self, s):
        h = (self.t1 - self.t0) * 1e-7
        u = self._u(s)
        d = (self._raw(u + h) - self._raw(u - h)) / (2 * h)
        return -d if self.flipped else d

    def reversed(self):
        return replace(self, flipped=not self.flipped)

    def split(self, s):
        if not self.flipped:
            return replace(self, t1=s), replace(self, t0=s)
        u = self.t0 + self.t1 - s
        return replace(self, t0=u), replace(self, t1=u)

    def validate(self):
        if not self.t0 < self.t1:
            raise CurveError("expr segment needs t0 < t1")
        p = dict(self.params)
        span = self.t1 - self.t0
        u = np.linspace(self.t0, self.t1, 33)
        h = span * 1e-6
        for comp in (self.x, self.y):
            try:
                vals = ex.evaluate(comp, u, p)
            except ex.EvaluationError as err:
                raise CurveError(f"expr segment not evaluable: {err}") from err
            if np.any(np.abs(vals.imag) > 1e-12 * np.maximum(1.0, np.abs(vals.real))):
                raise CurveError(f"expr segment component {ex.render(comp)} is not real")
            inner = u[1:-1]
            f = lambda t: np.real(ex.evaluate(comp, t, p))
            left = (f(inner) - f(inner - h)) / h
            right = (f(inner + h) - f(inner)) / h
            if np.any(np.abs(left - right) > 1e-3 * (1.0 + np.abs(left))):
                raise CurveError(f"expr segment component {ex.render(comp)} is not continuously differentiable")
        if _close(complex(self._raw(self.t0)), complex(self._raw(self.t1))) and np.allclose(
                self._raw(u), self._raw(self.t0)):
            raise CurveError("zero-length expr segment")

    def to_spec(self):
        spec = {"kind": "expr", "x": ex.render(self.x), "y": ex.render(self.y),
                "t": [self.t0, self.t1]}
        if self.flipped:
            spec["flipped"] = True
        return spec


Segment = LineSegment | ArcSegment | ExprSegment


@dataclass(frozen=True)
class Curve:
    segments: tuple
    _offsets: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise CurveError("curve has no segments")
        for seg in segs:
            seg.validate()
        for k, (a, b) in enumerate(zip(segs, segs[1:])):
            end = complex(a.point(a.domain[1]))
            start = complex(b.point(b.domain[0]))
            if not _close(end, start):
                raise CurveError(f"gap of {abs(end - start):.3g} between segments {k} and {k + 1}")
        t = segs[0].domain[0]
        offsets = [t]
        for seg in segs:
            t += seg.domain[1] - seg.domain[0]
            offsets.append(t)
        object.__setattr__(self, "_offsets", tuple(offsets))

    @property
    def t_start(self) -> float:
        return self._offsets[0]

    @property
    def t_end(self) -> float:
        return self._offsets[-1]

    @property
    def junctions(self) -> tuple:
        """Global parameter values of segment boundaries, ends included."""
        return self._offsets

    @property
    def start(self) -> complex:
        seg = self.segments[0]
        return complex(seg.point(seg.domain[0]))

    @property
    def end(self) -> complex:
        seg = self.segments[-1]
        return complex(seg.point(seg.domain[1]))

    @property
    def delta_z(self) -> complex:
        return self.end - self.start

    @property
    def closed(self) -> bool:
        return _close(self.start, self.end)

    def _locate(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self._offsets, t, side="right") - 1
        return np.clip(idx, 0, len(self.segments) - 1)

    def evaluate(self, t):
        """Vectorized (z(t), z'(t)) at global parameter values."""
        t = np.asarray(t, dtype=float)
        flat = np.atleast_1d(t)
        idx = np.atleast_1d(self._locate(flat))
        z = np.empty(flat.shape, dtype=complex)
        dz = np.empty(flat.shape, dtype=complex)
        for k in np.unique(idx):
            seg = self.segments[k]
            mask = idx == k
            s = seg.domain[0] + (flat[mask] - self._offsets[k])
            z[mask] = seg.point(s)
            dz[mask] = seg.tangent(s)
        if t.ndim == 0:
            return complex(z[0]), complex(dz[0])
        return z.reshape(t.shape), dz.reshape(t.shape)

    def point(self, t):
        return self.evaluate(t)[0]

    def sample(self, points_per_segment: int):
        """(t, z(t), z'(t)) at evenly spaced parameters on every segment."""
        if points_per_segment < 2:
            raise ValueError("points_per_segment must be at least 2")
        out = []
        for k, seg in enumerate(self.segments):
            s = np.linspace(*seg.domain, points_per_segment)
            t = self._offsets[k] + (s - seg.domain[0])
            for tk, zk, dk in zip(t, seg.point(s), seg.tangent(s)):
                out.append((float(tk), complex(zk), complex(dk)))
        return out

    def reverse(self) -> "Curve":
        return Curve(tuple(seg.reversed() for seg in reversed(self.segments)))

    def split(self, t: float):
        """Cut at an interior global parameter; both halves keep it."""
        if not self.t_start < t < self.t_end:
            raise ValueError(f"split point {t} is not interior to [{self.t_start}, {self.t_end}]")
        k = int(self._locate(t))
        seg = self.segments[k]
        s = seg.domain[0] + (t - self._offsets[k])
        if s <= seg.domain[0]:
            return Curve(self.segments[:k]), Curve(self.segments[k:])
        first, second = seg.split(s)
        return (Curve(self.segments[:k] + (first,)), Curve((second,) + self.segments[k + 1:]))

    def subcurve(self, ta: float, tb: float) -> "Curve":
        cur = self
        if tb < self.t_end:
            cur = cur.split(tb)[0]
        if ta > self.t_start:
            cur = cur.split(ta)[1]
        return cur

    def length(self, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
        total = 0.0
        for seg in self.segments:
            total += integrate(lambda s: np.abs(seg.tangent(s)), *seg.domain, cfg)[0]
        return float(total)

    def to_spec(self) -> dict:
        return {"segments": [seg.to_spec() for seg in self.segments]}


def concat(c1: Curve, c2: Curve) -> Curve:
    if not _close(c1.end, c2.start):
        raise CurveError(f"junction mismatch: {c1.end} vs {c2.start}")
    return Curve(c1.segments + c2.segments)


def reverse(curve: Curve) -> Curve:
    return curve.reverse()


def sample(curve: Curve, points_per_segment: int):
    return curve.sample(points_per_segment)


def line(z0, z1) -> Curve:
    return Curve((LineSegment(complex(z0), complex(z1)),))


def polygon(points, closed: bool = False) -> Curve:
    pts = [complex(p) for p in points]
    if closed and pts[0] != pts[-1]:
        pts.append(pts[0])
    return Curve(tuple(LineSegment(a, b) for a, b in zip(pts, pts[1:])))


def arc(center, radius, theta0, theta1) -> Curve:
    return Curve((ArcSegment(complex(center), float(radius), float(theta0), float(theta1)),))


def circle(center=0, radius=1.0, positive: bool = True) -> Curve:
    """Full circle starting and ending at angle -pi, as in the unit-circle examples."""
    if positive:
        return arc(center, radius, -math.pi, math.pi)
    return arc(center, radius, math.pi, -math.pi)


def rectangle(x0, x1, y0, y1) -> Curve:
    """Positively oriented boundary of [x0, x1] x [y0, y1]."""
    return polygon([complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)], closed=True)


_POINT = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
CURVE_SCHEMA = {
    "type": "object",
    "required": ["segments"],
    "properties": {
        "segments": {
            "type": "array",
            "minItems": 1,
            "items": {
                "oneOf": [
                    {"type": "object", "required": ["kind", "from", "to"],
                     "properties": {"kind": {"const": "line"}, "from": _POINT, "to": _POINT}},
                    {"type": "object", "required": ["kind", "center", "radius", "theta"],
                     "properties": {"kind": {"const": "arc"}, "center": _POINT,
                                    "radius": {"type": "number", "exclusiveMinimum": 0},
                                    "theta": _POINT}},
                    {"type": "object", "required": ["kind", "x", "y", "t"],
                     "properties": {"kind": {"const": "expr"}, "x": {"type": "string"},
                                    "y": {"type": "string"}, "t": _POINT,
                                    "flipped": {"type": "boolean"}}},
                ]
            },
        }
    },
}


def curve_from_spec(spec, params=None) -> Curve:
    """Build a curve from JSON text, a parsed dict, or a path to a JSON file."""
    if isinstance(spec, Path) or (isinstance(spec, str) and not spec.lstrip().startswith("{")):
        spec = Path(spec).read_text()
    if isinstance(spec, str):
        try:
            spec = json.loads(spec)
        except json.JSONDecodeError as err:
            raise CurveError(f"malformed curve JSON: {err}") from err
    try:
        jsonschema.validate(spec, CURVE_SCHEMA)
    except jsonschema.ValidationError as err:
        raise CurveError(f"curve spec does not match schema: {err.message}") from err
    frozen_params = tuple(sorted((params or {}).items()))
    segments = []
    for item in spec["segments"]:
        kind = item["kind"]
        if kind == "line":
            segments.append(LineSegment(complex(*item["from"]), complex(*item["to"])))
        elif kind == "arc":
            segments.append(ArcSegment(complex(*item["center"]), float(item["radius"]),
                                       float(item["theta"][0]), float(item["theta"][1])))
        else:
            try:
                x = ex.parse(item["x"], variable="t")
                y = ex.parse(item["y"], variable="t")
            except ex.ExpressionSyntaxError as err:
                raise CurveError(f"bad expr segment: {err}") from err
            segments.append(ExprSegment(x, y, float(item["t"][0]), float(item["t"][1]),
                                        bool(item.get("flipped", False)), frozen_params))
    return Curve(tuple(segments))


# ---------------------------------------------------------------- partitions

@dataclass(frozen=True)
class HalfPlanePartition:
    """Cuts a = t_0 < ... < t_m = b with one unit witness per piece.

    On piece k the values f(z(t)) lie in the open half plane
    {w : Re(conj(witness_k) * w) > 0}.
    """

    cuts: tuple
    witnesses: tuple

    def __len__(self):
        return len(self.witnesses)

    def pieces(self):
        return [(self.cuts[k], self.cuts[k + 1], self.witnesses[k]) for k in range(len(self))]


def _f_on_curve(f, curve, t, params):
    z = curve.point(t)
    vals = np.atleast_1d(ex.evaluate(f, z, params))
    small = np.abs(vals) <= EPS_ZERO
    if np.any(small):
        t_bad = np.atleast_1d(t)[np.argmax(small)]
        raise ZeroOfFunctionError(f"zero on curve: |f| <= {EPS_ZERO} at t={t_bad:.12g}")
    return vals


def _arg_steps(vals):
    return np.angle(vals[1:] / vals[:-1])


def half_plane_partition(f, curve: Curve, max_depth: int = 40, params=None,
                         samples: int = 64) -> HalfPlanePartition:
    """Bisect [a, b] until each piece's arg f has total variation < pi/2.

    Variation is measured on ``samples`` + 1 evenly spaced points per
    candidate piece; adjacent points must also be less than pi/4 apart in
    argument so the unwrapping between them is unambiguous.
    """
    f = ex.to_expr(f)
    cuts = [curve.t_start]
    witnesses = []

    def certify(tl, tr, depth):
        ts = np.linspace(tl, tr, samples + 1)
        vals = _f_on_curve(f, curve, ts, params)
        steps = np.abs(_arg_steps(vals))
        if steps.max(initial=0.0) < math.pi / 4 and steps.sum() < math.pi / 2 - ARG_MARGIN:
            mid = vals[samples // 2]
            cuts.append(tr)
            witnesses.append(complex(mid / abs(mid)))
            return
        if depth >= max_depth:
            raise PartitionError(
                f"cannot certify half-plane pieces near t={0.5 * (tl + tr):.12g} "
                f"within depth {max_depth} (f oscillates too fast or nearly vanishes)")
        tm = 0.5 * (tl + tr)
        certify(tl, tm, depth + 1)
        certify(tm, tr, depth + 1)

    certify(curve.t_start, curve.t_end, 0)
    return HalfPlanePartition(tuple(cuts), tuple(witnesses))


def refine_partition(partition: HalfPlanePartition, f, curve: Curve, factor: int = 2,
                     params=None) -> HalfPlanePartition:
    """Split every piece into ``factor`` equal sub-pieces with fresh witnesses."""
    f = ex.to_expr(f)
    cuts = [partition.cuts[0]]
    witnesses = []
    for tl, tr, _ in partition.pieces():
        edges = np.linspace(tl, tr, factor + 1)
        mids = _f_on_curve(f, curve, 0.5 * (edges[:-1] + edges[1:]), params)
        cuts.extend(float(e) for e in edges[1:])
        witnesses.extend(complex(m / abs(m)) for m in mids)
    cuts[-1] = partition.cuts[-1]
    return HalfPlanePartition(tuple(cuts), tuple(witnesses))


def certify_partition(partition: HalfPlanePartition, f, curve: Curve, probes: int = 256,
                      params=None) -> bool:
    """Re-check the half-plane property at fresh, interleaved probe points."""
    f = ex.to_expr(f)
    for tl, tr, w in partition.pieces():
        # offsets by an irrational fraction so probes miss the build samples
        frac = (np.arange(probes) + (math.sqrt(2) - 1)) / probes
        vals = _f_on_curve(f, curve, tl + frac * (tr - tl), params)
        if not np.all((np.conj(w) * vals).real > 0):
            return False
    return True
