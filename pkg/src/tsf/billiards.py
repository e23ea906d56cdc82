"""Rational billiards: unfolding, cylinder counting, Cesàro averaging.

A rational polygon (angles p_i/q_i * pi in lowest terms) unfolds to a
translation surface: the group generated by the reflections in the edge
directions is dihedral of order 2 * lcm(q_i), and one copy of the table per
group element, glued edge-to-edge, gives a closed surface.  Periodic
billiard trajectories correspond to flat cylinders on the unfolding;
N(Q, T) counts cylinders of waist at most T there.

The Cesàro series is the partial average (1/t) * integral_0^t
N(Q, e^s) e^{-2s} ds on a uniform s-grid (trapezoid rule), evaluated from a
single cylinder enumeration up to e^{t_max}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CapExceeded, ValidationError
from .geometry import cylinder_waists
from .surface import TranslationSurface, require_valid, validate_surface

ANGLE_TOL = 1e-9


@dataclass(frozen=True)
class RationalPolygon:
    """Simple polygon with rational angle data.

    ``angle_fractions[i] = p/q`` means the interior angle at ``vertices[i]``
    is (p/q) * pi; fractions must be in lowest terms and consistent with the
    vertex geometry within 1e-9.
    """

    vertices: tuple[tuple[float, float], ...]
    angle_fractions: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.vertices) != len(self.angle_fractions):
            raise ValidationError("one angle fraction per vertex required")
        for f in self.angle_fractions:
            if f <= 0:
                raise ValidationError(f"angle fraction {f} not positive")
            if math.gcd(f.numerator, f.denominator) != 1:
                raise ValidationError(f"angle fraction {f} not in lowest terms")
        n = len(self.vertices)
        for i in range(n):
            prev_v = self.vertices[(i - 1) % n]
            next_v = self.vertices[(i + 1) % n]
            here = self.vertices[i]
            a = math.atan2(prev_v[1] - here[1], prev_v[0] - here[0])
            b = math.atan2(next_v[1] - here[1], next_v[0] - here[0])
            ang = (a - b) % (2.0 * math.pi)
            want = float(self.angle_fractions[i]) * math.pi
            if abs(ang - want) > ANGLE_TOL:
                raise ValidationError(
                    f"vertex {i}: geometric angle {ang:.12g} does not match "
                    f"{self.angle_fractions[i]}*pi (irrational input?)"
                )


@dataclass(frozen=True)
class CountSeries:
    """Sampled series (t, value); ``kind`` is raw_count or cesaro."""

    points: tuple[tuple[float, float], ...]
    kind: str

    def __post_init__(self):
        if self.kind not in ("raw_count", "cesaro"):
            raise ValidationError(f"unknown series kind {self.kind!r}")
        ts = [t for t, _ in self.points]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValidationError("series t values must be strictly increasing")
        if self.kind == "raw_count":
            for _, v in self.points:
                if v < 0 or abs(v - round(v)) > 1e-9:
                    raise ValidationError("raw counts must be nonnegative integers")

    @property
    def final_value(self) -> float:
        return self.points[-1][1]


# ---------------------------------------------------------------------------
# unfolding
# ---------------------------------------------------------------------------
#
# Exact O(2) arithmetic: an element is (det, m) with m modulo 2N,
#   (+1, m) = rotation by pi*m/N,
#   (-1, m) = reflection whose matrix is F(2*base + pi*m/N), i.e. the
#             reflection across the line at angle base + pi*m/(2N),
# where base is the direction of edge 0.  Composition rules:
#   (+1,a)(+1,b) = (+1, a+b)     (+1,a)(-1,b) = (-1, a+b)
#   (-1,a)(+1,b) = (-1, a-b)     (-1,a)(-1,b) = (+1, a-b)


def _edge_direction_fractions(fr: tuple[Fraction, ...]) -> list[Fraction]:
    """Edge directions relative to edge 0, in units of pi."""
    dirs = [Fraction(0)]
    for i in range(1, len(fr)):
        dirs.append(dirs[-1] + (1 - fr[i]))
    return dirs


def _mul(a, b, two_n: int):
    da, ma = a
    db, mb = b
    if da == 1:
        return (db, (ma + mb) % two_n)
    return (-db, (ma - mb) % two_n)


def dihedral_elements(fr: tuple[Fraction, ...]) -> tuple[int, list[tuple[int, int]]]:
    """(N, elements) for the reflection group of the edge directions."""
    N = 1
    for f in fr:
        N = N * f.denominator // math.gcd(N, f.denominator)
    two_n = 2 * N
    gens = []
    for d in _edge_direction_fractions(fr):
        r = d % 2  # direction modulo pi*2
        m = r * N
        if m.denominator != 1:
            raise ValidationError("edge direction is not a multiple of pi/N")
        gens.append((-1, (2 * int(m)) % two_n))
    seen = {(1, 0)}
    frontier = [(1, 0)]
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                p = _mul(h, g, two_n)
                if p not in seen:
                    seen.add(p)
                    nxt.append(p)
        frontier = nxt
    return N, sorted(seen)


def _element_matrix(det: int, m: int, N: int, base: float) -> np.ndarray:
    if det == 1:
        th = math.pi * m / N
        c, s = math.cos(th), math.sin(th)
        return np.array([[c, -s], [s, c]])
    th = 2.0 * base + math.pi * m / N
    c, s = math.cos(th), math.sin(th)
    return np.array([[c, s], [s, -c]])


def unfold(q: RationalPolygon, group_cap: int = 1000) -> TranslationSurface:
    """Unfold a rational billiard table to a closed translation surface.

    One polygon per element of the dihedral group D_N (N = lcm of the angle
    denominators); copy g is the linear image g(Q), with reversed vertex
    order when det g = -1 so every polygon stays counterclockwise.  Edge i
    of copy g is glued to edge i of copy g * (reflection across edge i).
    """
    fr = q.angle_fractions
    N, elements = dihedral_elements(fr)
    two_n = 2 * N
    if len(elements) > group_cap:
        raise CapExceeded(
            f"reflection group order {len(elements)} exceeds cap {group_cap}"
        )
    if len(elements) != 2 * N:
        raise ValidationError(
            f"reflection group order {len(elements)} != 2N = {2 * N}"
        )

    verts = [np.array(v, dtype=float) for v in q.vertices]
    n = len(verts)
    e0 = verts[1] - verts[0]
    base = math.atan2(e0[1], e0[0])

    refl = []
    for d in _edge_direction_fractions(fr):
        m = (d % 2) * N
        refl.append((-1, (2 * int(m)) % two_n))

    index = {g: i for i, g in enumerate(elements)}
    polys = []
    edge_of = []  # edge_of[copy][original edge i] = stored edge slot
    for det, m in elements:
        mat = _element_matrix(det, m, N, base)
        imgs = [mat @ v for v in verts]
        if det == 1:
            poly = tuple((float(p[0]), float(p[1])) for p in imgs)
            slots = {i: i for i in range(n)}
        else:
            poly = tuple((float(p[0]), float(p[1])) for p in imgs[::-1])
            slots = {i: (n - 2 - i) % n for i in range(n)}
        polys.append(poly)
        edge_of.append(slots)

    gluings = []
    seen = set()
    for gi, g in enumerate(elements):
        for i in range(n):
            hj = index[_mul(g, refl[i], two_n)]
            a = (gi, edge_of[gi][i])
            b = (hj, edge_of[hj][i])
            key = frozenset((a, b))
            if key in seen:
                continue
            seen.add(key)
            gluings.append((a, b))

    surf = TranslationSurface(tuple(polys), tuple(gluings), label="unfolded")
    report = validate_surface(surf)
    if not report.ok:
        raise ValidationError(
            "unfolding failed validation: " + "; ".join(report.violations)
        )
    return surf


def reflection_group_order(q: RationalPolygon) -> int:
    return len(dihedral_elements(q.angle_fractions)[1])


# ---------------------------------------------------------------------------
# counting
# ---------------------------------------------------------------------------


def _waists(q, t_max_len: float) -> np.ndarray:
    s = unfold(q) if isinstance(q, RationalPolygon) else q
    require_valid(s)
    return cylinder_waists(s, float(t_max_len))


def billiard_count(q: RationalPolygon | TranslationSurface, t_len: float) -> int:
    """N(Q, T): number of cylinders of waist <= T on the unfolding."""
    if t_len <= 0:
        raise ValidationError("T must be positive")
    return int(len(_waists(q, t_len)))


def count_series(
    q: RationalPolygon | TranslationSurface, t_max: float, steps: int
) -> CountSeries:
    """Raw series N(Q, e^t) on the uniform grid t_j = j*t_max/steps."""
    waists = _waists(q, math.exp(t_max))
    ts = np.linspace(0.0, t_max, steps + 1)
    counts = np.searchsorted(waists, np.exp(ts) * (1 + 1e-12), side="right")
    pts = tuple((float(t), float(c)) for t, c in zip(ts, counts))
    return CountSeries(points=pts, kind="raw_count")


def cesaro_sv(
    q: RationalPolygon | TranslationSurface, t_max: float, steps: int
) -> CountSeries:
    """Partial Cesàro averages of N(Q, e^s) e^{-2s} over [0, t].

    Trapezoid rule on the uniform s-grid; one cylinder enumeration up to
    e^{t_max} serves every grid point.  The returned series holds the
    running average at each positive grid point.
    """
    if t_max <= 0:
        raise ValidationError("t_max must be positive")
    if steps < 10:
        raise ValidationError("steps must be at least 10")
    waists = _waists(q, math.exp(t_max))
    ts = np.linspace(0.0, t_max, steps + 1)
    counts = np.searchsorted(waists, np.exp(ts) * (1 + 1e-12), side="right")
    integrand = counts * np.exp(-2.0 * ts)
    dt = t_max / steps
    partial = np.concatenate(
        [[0.0], np.cumsum(0.5 * (integrand[1:] + integrand[:-1]) * dt)]
    )
    cesaro = partial[1:] / ts[1:]
    pts = tuple((float(t), float(v)) for t, v in zip(ts[1:], cesaro))
    return CountSeries(points=pts, kind="cesaro")
