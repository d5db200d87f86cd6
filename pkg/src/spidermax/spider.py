"""Geometry, measure and piecewise-function algebra on the k-ray spider domain.

The domain is the union of k unit-length rays glued at the origin, with the
railway metric (distance through the hub between different rays) and the
normalized length measure: each ray carries mass 1/k, the whole domain mass 1.

Two function representations are used everywhere:

* ``StepFunction``  -- finitely many constant pieces per ray; closed-form
  integrals and norms, exact under rational arithmetic.
* ``PiecewiseMobius`` -- pieces of the form (a + b x)/(c + d x); this is the
  exact shape of the uncentered maximal function of a step function.
  Level sets at any height solve linearly piece by piece; p-th power
  integrals use Gauss quadrature with an error bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from . import intervals as iv
from .numeric import Real, all_exact, number_to_json, parse_number


# --------------------------------------------------------------------------
# points and balls
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SpiderPoint:
    """A point of the domain: ray index (1-based) and distance from the hub."""

    ray: int
    pos: Real

    def __post_init__(self):
        if self.ray < 1:
            raise ValueError("ray index must be >= 1")
        if not 0 <= self.pos <= 1:
            raise ValueError("pos must lie in [0, 1]")


@dataclass(frozen=True)
class Ball:
    """A metric ball: either an interval on one ray or a star around the hub.

    Interval: trace [a, b) on `ray`, empty elsewhere.
    Star: trace [0, b) on `ray`, [0, t) on every other ray, with t <= b.
    """

    kind: str  # "interval" | "star"
    ray: int
    a: Real = 0
    b: Real = 0
    t: Real = 0

    def __post_init__(self):
        if self.ray < 1:
            raise ValueError("ray index must be >= 1")
        if self.kind == "interval":
            if not 0 <= self.a < self.b <= 1:
                raise ValueError("interval ball needs 0 <= a < b <= 1")
        elif self.kind == "star":
            if not 0 < self.b <= 1:
                raise ValueError("star ball needs 0 < b <= 1")
            if not 0 <= self.t <= min(self.b, 1):
                raise ValueError("star ball needs 0 <= t <= min(b, 1)")
        else:
            raise ValueError(f"unknown ball kind {self.kind!r}")

    @staticmethod
    def interval(ray: int, a: Real, b: Real) -> "Ball":
        return Ball("interval", ray, a=a, b=b)

    @staticmethod
    def star(ray: int, b: Real, t: Real) -> "Ball":
        return Ball("star", ray, b=b, t=t)

    @staticmethod
    def from_center_radius(ray: int, center: Real, radius: Real) -> "Ball":
        """The open ball around (ray, center); traces follow the railway metric."""
        if not 0 <= center <= 1 or radius <= 0:
            raise ValueError("need center in [0,1] and radius > 0")
        b = min(center + radius, 1)
        t = radius - center
        if t <= 0:
            return Ball.interval(ray, center - radius, b)
        return Ball.star(ray, b=b, t=min(t, 1))

    def to_json(self) -> dict:
        if self.kind == "interval":
            return {"kind": "interval", "ray": self.ray,
                    "a": number_to_json(self.a), "b": number_to_json(self.b)}
        return {"kind": "star", "ray": self.ray,
                "b": number_to_json(self.b), "t": number_to_json(self.t)}

    @staticmethod
    def from_json(obj: dict) -> "Ball":
        if obj["kind"] == "interval":
            return Ball.interval(obj["ray"], parse_number(obj["a"]), parse_number(obj["b"]))
        return Ball.star(obj["ray"], parse_number(obj["b"]), parse_number(obj["t"]))


def ball_trace(ball: Ball, ray: int) -> Optional[tuple[Real, Real]]:
    """Trace of the ball on a ray as a half-open interval, or None if empty."""
    if ray < 1:
        raise ValueError("ray index must be >= 1")
    if ball.kind == "interval":
        return (ball.a, ball.b) if ray == ball.ray else None
    if ray == ball.ray:
        return (0, ball.b)
    return (0, ball.t) if ball.t > 0 else None


def measure(traces: Sequence[Iterable[tuple[Real, Real]]], k: int) -> Real:
    """Measure of a per-ray family of disjoint intervals; rejects overlaps."""
    if k < 1 or len(traces) != k:
        raise ValueError("need one trace list per ray")
    total: Real = 0
    for ray_traces in traces:
        ray_traces = list(ray_traces)
        if not iv.is_disjoint(ray_traces):
            raise ValueError("overlapping intervals on one ray; canonicalize first")
        for lo, hi in ray_traces:
            if not 0 <= lo < hi <= 1:
                raise ValueError("trace outside [0, 1]")
            total += hi - lo
    return total / k if isinstance(total, float) else Fraction(total, k)


def ball_measure(ball: Ball, k: int) -> Real:
    traces = [[t] if (t := ball_trace(ball, r)) else [] for r in range(1, k + 1)]
    return measure(traces, k)


# --------------------------------------------------------------------------
# step functions
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class StepFunction:
    """Right-continuous step function on the spider.

    ``rays[j] = (breakpoints, values)`` with 0 = b_0 < ... < b_m = 1 and
    value v_i on [b_{i-1}, b_i).
    """

    k: int
    rays: tuple[tuple[tuple[Real, ...], tuple[Real, ...]], ...]

    def __post_init__(self):
        if self.k < 1 or len(self.rays) != self.k:
            raise ValueError("need one (breakpoints, values) pair per ray")
        for bps, vals in self.rays:
            if len(bps) != len(vals) + 1 or len(vals) < 1:
                raise ValueError("breakpoints must be one longer than values")
            if bps[0] != 0 or bps[-1] != 1:
                raise ValueError("breakpoints must start at 0 and end at 1")
            if any(a >= b for a, b in zip(bps, bps[1:])):
                raise ValueError("breakpoints must be strictly increasing")

    @staticmethod
    def constant(c: Real, k: int) -> "StepFunction":
        return StepFunction(k, tuple(((0, 1), (c,)) for _ in range(k)))

    @staticmethod
    def from_rays(k: int, rays) -> "StepFunction":
        return StepFunction(k, tuple((tuple(b), tuple(v)) for b, v in rays))

    @staticmethod
    def radial(k: int, breakpoints, values) -> "StepFunction":
        """Same profile on every ray."""
        return StepFunction(k, tuple((tuple(breakpoints), tuple(values)) for _ in range(k)))

    @staticmethod
    def indicator(k: int, cut: Real) -> "StepFunction":
        """Indicator of {pos < cut} on every ray."""
        if not 0 < cut < 1:
            raise ValueError("cut must be in (0, 1)")
        return StepFunction.radial(k, (0, cut, 1), (1, 0))

    def value_at(self, ray: int, pos: Real) -> Real:
        bps, vals = self.rays[ray - 1]
        if pos >= 1:
            return vals[-1]
        lo, hi = 0, len(vals) - 1
        while lo < hi:  # last breakpoint <= pos
            mid = (lo + hi + 1) // 2
            if bps[mid] <= pos:
                lo = mid
            else:
                hi = mid - 1
        return vals[lo]

    def __call__(self, point: SpiderPoint) -> Real:
        return self.value_at(point.ray, point.pos)

    def pieces(self, ray: int):
        bps, vals = self.rays[ray - 1]
        for i, v in enumerate(vals):
            yield bps[i], bps[i + 1], v

    def map_values(self, fn) -> "StepFunction":
        return StepFunction(self.k, tuple((bps, tuple(fn(v) for v in vals))
                                          for bps, vals in self.rays))

    def abs(self) -> "StepFunction":
        return self.map_values(abs)

    def scale(self, c: Real) -> "StepFunction":
        return self.map_values(lambda v: c * v)

    def max_value(self) -> Real:
        return max(max(vals) for _, vals in self.rays)

    def is_exact(self) -> bool:
        return all(all_exact(bps) and all_exact(vals) for bps, vals in self.rays)

    def is_radially_decreasing(self) -> bool:
        """Non-increasing along each ray and identical across rays."""
        first = self.rays[0]
        if any(r != first for r in self.rays[1:]):
            return False
        _, vals = first
        return all(a >= b for a, b in zip(vals, vals[1:]))

    def superlevel(self, s: Real, strict: bool = True) -> list[list[tuple[Real, Real]]]:
        """Per-ray interval sets {pos : |f| > s} (or >= s)."""
        out = []
        for ray in range(1, self.k + 1):
            sel = [(lo, hi) for lo, hi, v in self.pieces(ray)
                   if (abs(v) > s if strict else abs(v) >= s)]
            out.append(iv.canonicalize(sel))
        return out

    def to_json(self) -> dict:
        return {"k": self.k,
                "rays": [[[number_to_json(b) for b in bps],
                          [number_to_json(v) for v in vals]]
                         for bps, vals in self.rays]}

    @staticmethod
    def from_json(obj: dict) -> "StepFunction":
        rays = tuple((tuple(parse_number(b) for b in bps),
                      tuple(parse_number(v) for v in vals))
                     for bps, vals in obj["rays"])
        return StepFunction(obj["k"], rays)


def refine_breakpoints(f: StepFunction) -> list[Real]:
    """Sorted union of all rays' breakpoints (always contains 0 and 1)."""
    pts = set()
    for bps, _ in f.rays:
        pts.update(bps)
    return sorted(pts)


def integrate(f: StepFunction) -> Real:
    """Integral against the normalized measure (each ray weighted 1/k)."""
    total: Real = 0
    for ray in range(1, f.k + 1):
        for lo, hi, v in f.pieces(ray):
            total += v * (hi - lo)
    return total / f.k if isinstance(total, float) else Fraction(total, f.k)


def integrate_over(f: StepFunction, region: Sequence[Iterable[tuple[Real, Real]]]) -> Real:
    """Integral of f over a per-ray interval set."""
    total: Real = 0
    for ray in range(1, f.k + 1):
        reg = iv.canonicalize(list(region[ray - 1]))
        for lo, hi, v in f.pieces(ray):
            for rlo, rhi in reg:
                a, b = max(lo, rlo), min(hi, rhi)
                if a < b:
                    total += v * (b - a)
    return total / f.k if isinstance(total, float) else Fraction(total, f.k)


# --------------------------------------------------------------------------
# piecewise-Moebius functions
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class MobiusPiece:
    """Value (a + b x)/(c + d x) on [lo, hi); denominator positive inside.

    The denominator may vanish at an endpoint only together with the
    numerator (a removable 0/0); evaluation resolves it as b/d.
    """

    lo: Real
    hi: Real
    a: Real
    b: Real
    c: Real
    d: Real

    def value(self, x: Real) -> Real:
        den = self.c + self.d * x
        if den == 0:
            return self.b / self.d
        return (self.a + self.b * x) / den


class PiecewiseMobius:
    """Per-ray lists of Moebius pieces tiling [0, 1]."""

    def __init__(self, k: int, rays: Sequence[Sequence[MobiusPiece]]):
        if k < 1 or len(rays) != k:
            raise ValueError("need one piece list per ray")
        for pieces in rays:
            if not pieces:
                raise ValueError("empty ray")
            if pieces[0].lo != 0 or pieces[-1].hi != 1:
                raise ValueError("pieces must tile [0, 1]")
            for p, q in zip(pieces, pieces[1:]):
                if p.hi != q.lo:
                    raise ValueError("pieces must tile without gaps")
        self.k = k
        self.rays = tuple(tuple(pieces) for pieces in rays)

    def value_at(self, ray: int, pos: Real) -> Real:
        pieces = self.rays[ray - 1]
        if pos >= 1:
            return pieces[-1].value(pos)
        lo, hi = 0, len(pieces) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if pieces[mid].lo <= pos:
                lo = mid
            else:
                hi = mid - 1
        return pieces[lo].value(pos)

    def __call__(self, point: SpiderPoint) -> Real:
        return self.value_at(point.ray, point.pos)

    def check_continuity(self, tol: float = 1e-9) -> bool:
        """Adjacent pieces agree at shared endpoints (exact types: equality)."""
        for pieces in self.rays:
            for p, q in zip(pieces, pieces[1:]):
                left, right = p.value(p.hi), q.value(q.lo)
                if left == right:
                    continue
                scale = max(abs(left), abs(right), 1)
                if abs(left - right) > tol * scale:
                    return False
        return True

    def superlevel(self, s: Real, strict: bool = True) -> list[list[tuple[Real, Real]]]:
        """Per-ray interval sets {g > s} (or >= s); linear solve per piece."""
        if s < 0:
            raise ValueError("level must be nonnegative")
        out = []
        for pieces in self.rays:
            sel: list[tuple[Real, Real]] = []
            for p in pieces:
                # (a + b x) - s (c + d x) > 0 with positive denominator
                alpha = p.a - s * p.c
                beta = p.b - s * p.d
                sel.extend(_linear_positive(alpha, beta, p.lo, p.hi, strict))
            out.append(iv.canonicalize(sel))
        return out


def _linear_positive(alpha: Real, beta: Real, lo: Real, hi: Real,
                     strict: bool) -> list[tuple[Real, Real]]:
    """{x in [lo, hi) : alpha + beta x > 0} (or >= 0)."""
    if beta == 0:
        ok = alpha > 0 if strict else alpha >= 0
        return [(lo, hi)] if ok else []
    root = -alpha / beta if isinstance(alpha, float) or isinstance(beta, float) \
        else Fraction(-alpha, beta)
    if beta > 0:
        start = max(lo, root)
        return [(start, hi)] if start < hi else []
    end = min(hi, root)
    return [(lo, end)] if lo < end else []


def level_measure(g, s: Real, strict: bool = True) -> Real:
    """Measure of the superlevel set {g > s} (or >= s) for step or Moebius g."""
    region = g.superlevel(s, strict=strict)
    total: Real = 0
    for ray_set in region:
        total += iv.total_length(ray_set)
    return total / g.k if isinstance(total, float) else Fraction(total, g.k)


def restricted_integral(g, f: StepFunction, s: Real, strict: bool = True) -> Real:
    """Integral of |f| over {g > s}."""
    if f.k != g.k:
        raise ValueError("ray counts differ")
    return integrate_over(f.abs(), g.superlevel(s, strict=strict))


# --------------------------------------------------------------------------
# norms
# --------------------------------------------------------------------------

_GAUSS_NODES, _GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _quad_piece(p: MobiusPiece, power: float, lo: float, hi: float) -> float:
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    x = mid + half * _GAUSS_NODES
    den = p.c + p.d * x
    if np.any(den == 0.0):
        # only removable 0/0 endpoints can round onto a node
        limit = p.b / p.d if p.d != 0 else 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = np.where(den == 0.0, limit, (p.a + p.b * x) / den)
        vals = np.abs(vals)
    else:
        vals = np.abs((p.a + p.b * x) / den)
    return float(half * np.dot(_GAUSS_WEIGHTS, vals**power))


def _quad_piece_adaptive(p: MobiusPiece, power: float, lo: float, hi: float,
                         tol: float, budget: int = 400) -> tuple[float, float]:
    """Bisection-refined Gauss quadrature with an honest error bound.

    Refinement stops at the requested tolerance, at the piece's roundoff
    floor (the Moebius evaluation is ill-conditioned where the denominator
    nearly cancels), or at the evaluation budget; the returned bound
    reflects whatever error remains.
    """
    dmin = min(abs(float(p.c) + float(p.d) * lo), abs(float(p.c) + float(p.d) * hi))
    cond = (abs(float(p.c)) + abs(float(p.d))) / dmin if dmin > 0 else 1e30
    stack = [(lo, hi, tol)]
    total = err_total = 0.0
    evals = 0
    while stack:
        a, b, t = stack.pop()
        whole = _quad_piece(p, power, a, b)
        mid = 0.5 * (a + b)
        left = _quad_piece(p, power, a, mid)
        right = _quad_piece(p, power, mid, b)
        evals += 3
        err = abs(whole - (left + right))
        floor = 4e-16 * max(power, 1.0) * cond * (abs(left) + abs(right))
        if err <= max(t, floor) or evals >= budget or mid in (a, b):
            total += left + right
            err_total += err
        else:
            stack.append((a, mid, t / 2))
            stack.append((mid, b, t / 2))
    return total, err_total


def power_integral(g: PiecewiseMobius, power: float, tol: float = 1e-10) -> tuple[float, float]:
    """(integral of |g|^power, error bound) under the normalized measure."""
    pieces = [p for pieces in g.rays for p in pieces]
    total, err = 0.0, 0.0
    per_piece_tol = tol / max(len(pieces), 1)
    contributions = []
    for p in pieces:
        lo, hi = float(p.lo), float(p.hi)
        if hi <= lo:
            continue
        # split at a numerator sign change so |.| stays smooth per subpiece
        cuts = [lo, hi]
        if p.b != 0:
            z = -float(p.a) / float(p.b)
            if lo < z < hi:
                cuts = [lo, z, hi]
        for a, b in zip(cuts, cuts[1:]):
            v, e = _quad_piece_adaptive(p, power, a, b, per_piece_tol)
            contributions.append(v)
            err += e
    total = math.fsum(contributions) / g.k
    return total, err / g.k


def lp_norm(f, p: float, tol: float = 1e-10) -> float:
    """L^p norm, p > 1: closed form for step functions, quadrature for Moebius."""
    if p <= 1:
        raise ValueError("need p > 1")
    if isinstance(f, StepFunction):
        total = math.fsum(abs(float(v)) ** p * float(hi - lo)
                          for ray in range(1, f.k + 1)
                          for lo, hi, v in f.pieces(ray))
        return (total / f.k) ** (1 / p)
    value, _ = power_integral(f, p, tol=tol)
    return value ** (1 / p)


def lp_norm_report(g: PiecewiseMobius, p: float, tol: float = 1e-10) -> tuple[float, float]:
    """(norm, absolute error bound on the underlying power integral)."""
    value, err = power_integral(g, p, tol=tol)
    return value ** (1 / p), err


def lp_norm_exact_power(f: StepFunction, p: int) -> Real:
    """Exact integral of |f|^p for integer p and rational data."""
    if not isinstance(p, int) or p <= 1:
        raise ValueError("exact power norm needs integer p > 1")
    total: Real = 0
    for ray in range(1, f.k + 1):
        for lo, hi, v in f.pieces(ray):
            total += abs(v) ** p * (hi - lo)
    return Fraction(total, f.k) if not isinstance(total, float) else total / f.k
