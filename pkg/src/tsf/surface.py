"""Polygonal translation surfaces.

A surface is a finite collection of simple planar polygons (counterclockwise
vertex order) together with a pairwise gluing of their edges by translations.
Glued edges must therefore be parallel, of equal length and oppositely
oriented.  Cone points appear at identified vertices whose total angle is a
multiple of 2*pi; vertex classes with angle exactly 2*pi are kept as marked
points.

Coordinates are plain floats.  Geometric checks use the tolerances below;
all combinatorial structure (vertex classes, the glued complex) is derived
exactly from the gluing data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import InconsistencyError, ValidationError

#: tolerance for edge-vector matching and cone-angle sums
GEOM_TOL = 1e-9

Vec = tuple[float, float]
EdgeRef = tuple[int, int]  # (polygon index, edge index)


@dataclass(frozen=True)
class TranslationSurface:
    """Polygons plus translation gluings.

    ``polygons[p]`` is a tuple of vertices in counterclockwise order; edge
    ``(p, i)`` runs from vertex ``i`` to vertex ``i+1 (mod n)``.  ``gluings``
    pairs edge references; the pairing is unordered but stored as given.
    """

    polygons: tuple[tuple[Vec, ...], ...]
    gluings: tuple[tuple[EdgeRef, EdgeRef], ...]
    label: str = "surface"

    def edge_vector(self, p: int, i: int) -> Vec:
        verts = self.polygons[p]
        a = verts[i]
        b = verts[(i + 1) % len(verts)]
        return (b[0] - a[0], b[1] - a[1])

    def edge_count(self) -> int:
        return sum(len(poly) for poly in self.polygons)

    def scaled(self, factor: float, label: str | None = None) -> "TranslationSurface":
        polys = tuple(
            tuple((x * factor, y * factor) for x, y in poly) for poly in self.polygons
        )
        return TranslationSurface(polys, self.gluings, label or self.label)


@dataclass(frozen=True)
class Stratum:
    """Cone-point data: orders of the zeros, genus, distinguished points.

    ``alpha`` lists the positive zero orders (cone angle ``2*pi*(a+1)``);
    marked points (angle exactly ``2*pi``) are omitted from ``alpha`` but
    counted in ``zero_count``, which is the total number of distinguished
    vertex classes of the glued complex.  On the torus the single vertex
    class is the conventional marked point, so ``alpha == ()`` and
    ``zero_count == 1``.
    """

    alpha: tuple[int, ...]
    genus: int
    zero_count: int


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...]
    cone_angles: tuple[float, ...]  # per vertex class, in units of 2*pi

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class PeriodMatrix:
    """Edge-holonomy integrals over a fixed relative homology basis.

    Row 0 holds the horizontal parts, row 1 the vertical parts.  The first
    ``2 * genus`` columns are absolute cycles ordered so that consecutive
    pairs ``(2j, 2j+1)`` have intersection number +1 (standard symplectic
    blocks); the remaining columns are arcs joining vertex class 0 to the
    other classes.  ``basis_tag`` identifies the combinatorial basis; two
    surfaces share a tag iff they share polygons/gluing combinatorics, so
    matrices with equal tags are comparable entry by entry.
    """

    entries: tuple[tuple[float, ...], tuple[float, ...]]
    basis_tag: str
    genus: int
    zero_count: int

    @property
    def k(self) -> int:
        return len(self.entries[0])

    def column(self, j: int) -> Vec:
        return (self.entries[0][j], self.entries[1][j])


# ---------------------------------------------------------------------------
# combinatorics of the glued complex
# ---------------------------------------------------------------------------


def _gluing_map(s: TranslationSurface) -> dict[EdgeRef, EdgeRef]:
    """Involution edge -> glued partner.  Raises on reuse, ignores gaps."""
    out: dict[EdgeRef, EdgeRef] = {}
    for a, b in s.gluings:
        if a in out or b in out or a == b:
            raise ValidationError(f"edge reused in gluings: {a} ~ {b}")
        out[a] = b
        out[b] = a
    return out


def _corner_angle(s: TranslationSurface, p: int, v: int) -> float:
    """Interior angle at vertex ``v`` of polygon ``p``, in (0, 2*pi)."""
    verts = s.polygons[p]
    n = len(verts)
    prev_v = verts[(v - 1) % n]
    next_v = verts[(v + 1) % n]
    here = verts[v]
    a = (prev_v[0] - here[0], prev_v[1] - here[1])  # towards previous vertex
    b = (next_v[0] - here[0], next_v[1] - here[1])  # towards next vertex
    # CCW polygon: interior angle sweeps from b counterclockwise to a.
    ang = math.atan2(a[1], a[0]) - math.atan2(b[1], b[0])
    ang %= 2.0 * math.pi
    if ang == 0.0:
        ang = 2.0 * math.pi
    return ang


def _corner_orbits(s: TranslationSurface) -> list[list[tuple[int, int]]]:
    """Vertex classes as cyclic corner orbits.

    Walking counterclockwise around an identified vertex, the corner after
    ``(p, v)`` is the corner at the start vertex of the edge glued to
    ``(p, v-1)``.
    """
    glue = _gluing_map(s)
    orbits: list[list[tuple[int, int]]] = []
    seen: set[tuple[int, int]] = set()
    for p, poly in enumerate(s.polygons):
        for v in range(len(poly)):
            if (p, v) in seen:
                continue
            orbit = []
            cur = (p, v)
            while cur not in seen:
                seen.add(cur)
                orbit.append(cur)
                cp, cv = cur
                n = len(s.polygons[cp])
                incoming = (cp, (cv - 1) % n)
                if incoming not in glue:
                    raise ValidationError(f"unglued edge {incoming}")
                cur = glue[incoming]  # (q, j): corner at start vertex of glued edge
            orbits.append(orbit)
    return orbits


def vertex_classes(s: TranslationSurface) -> list[list[tuple[int, int]]]:
    """Corner orbits of the glued complex (one list per vertex class)."""
    return _corner_orbits(s)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def _polygon_is_simple(verts: tuple[Vec, ...]) -> bool:
    n = len(verts)

    def seg(i):
        return verts[i], verts[(i + 1) % n]

    def intersects(s1, s2) -> bool:
        (ax, ay), (bx, by) = s1
        (cx, cy), (dx, dy) = s2

        def orient(ox, oy, px, py, qx, qy):
            return (px - ox) * (qy - oy) - (py - oy) * (qx - ox)

        d1 = orient(ax, ay, bx, by, cx, cy)
        d2 = orient(ax, ay, bx, by, dx, dy)
        d3 = orient(cx, cy, dx, dy, ax, ay)
        d4 = orient(cx, cy, dx, dy, bx, by)
        return d1 * d2 < 0 and d3 * d4 < 0

    for i in range(n):
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            if intersects(seg(i), seg(j)):
                return False
    return True


def polygon_area(verts: tuple[Vec, ...]) -> float:
    """Signed shoelace area (positive for counterclockwise order)."""
    total = 0.0
    n = len(verts)
    for i in range(n):
        x0, y0 = verts[i]
        x1, y1 = verts[(i + 1) % n]
        total += x0 * y1 - x1 * y0
    return 0.5 * total


def area(s: TranslationSurface) -> float:
    """Total flat area (sum of polygon areas)."""
    return sum(polygon_area(poly) for poly in s.polygons)


def validate_surface(s: TranslationSurface) -> ValidationReport:
    """Check all structural and geometric invariants; violations are data."""
    violations: list[str] = []

    for p, poly in enumerate(s.polygons):
        if len(poly) < 3:
            violations.append(f"polygon {p} has fewer than 3 vertices")
            continue
        if polygon_area(poly) <= 0:
            violations.append(f"polygon {p} is not counterclockwise")
        elif not _polygon_is_simple(poly):
            violations.append(f"polygon {p} is not simple")

    if violations:
        return ValidationReport(tuple(violations), ())

    # gluing structure
    try:
        glue = _gluing_map(s)
    except ValidationError as exc:
        return ValidationReport((str(exc),), ())

    for p, poly in enumerate(s.polygons):
        for i in range(len(poly)):
            if (p, i) not in glue:
                violations.append(f"unglued edge ({p}, {i})")
    for a, b in s.gluings:
        pa, ia = a
        if pa >= len(s.polygons) or ia >= len(s.polygons[pa]):
            violations.append(f"gluing references missing edge {a}")
            continue
        pb, ib = b
        if pb >= len(s.polygons) or ib >= len(s.polygons[pb]):
            violations.append(f"gluing references missing edge {b}")
            continue
        va = s.edge_vector(*a)
        vb = s.edge_vector(*b)
        resid = math.hypot(va[0] + vb[0], va[1] + vb[1])
        scale = max(1.0, math.hypot(*va))
        if resid > GEOM_TOL * scale:
            violations.append(
                f"non-translation gluing {a} ~ {b} (edge-vector residual {resid:.3g})"
            )

    if violations:
        return ValidationReport(tuple(violations), ())

    # cone angles
    angles: list[float] = []
    try:
        orbits = _corner_orbits(s)
    except ValidationError as exc:
        return ValidationReport((str(exc),), ())
    for orbit in orbits:
        total = sum(_corner_angle(s, p, v) for p, v in orbit)
        turns = total / (2.0 * math.pi)
        angles.append(turns)
        if abs(turns - round(turns)) > GEOM_TOL or round(turns) < 1:
            violations.append(
                f"cone angle {total:.12g} at vertex class {orbit[0]} is not a "
                f"positive multiple of 2*pi"
            )

    return ValidationReport(tuple(violations), tuple(angles))


def require_valid(s: TranslationSurface) -> None:
    report = validate_surface(s)
    if not report.ok:
        raise ValidationError("; ".join(report.violations))


def stratum_of(s: TranslationSurface) -> Stratum:
    """Zero orders and genus of the glued complex.

    The genus comes from the Euler characteristic V - E + F of the complex;
    the zero orders come from the cone angles.  The two computations must
    agree through sum(alpha) = 2g - 2 counted with marked points.
    """
    report = validate_surface(s)
    if not report.ok:
        raise ValidationError("; ".join(report.violations))

    v = len(report.cone_angles)
    e = len(s.gluings)
    f = len(s.polygons)
    chi = v - e + f
    if chi % 2 != 0 or chi > 2:
        raise InconsistencyError(f"Euler characteristic {chi} is not of genus form")
    genus = (2 - chi) // 2

    orders = [round(t) - 1 for t in report.cone_angles]
    if sum(orders) != 2 * genus - 2:
        raise InconsistencyError(
            f"angle data (sum of orders {sum(orders)}) disagrees with Euler "
            f"genus {genus}"
        )
    alpha = tuple(sorted((a for a in orders if a > 0), reverse=True))
    return Stratum(alpha=alpha, genus=genus, zero_count=v)


def normalize_area(s: TranslationSurface) -> TranslationSurface:
    """Rescale so the total area is 1; the stratum is unchanged."""
    a = area(s)
    if a <= 0:
        raise ValidationError(f"nonpositive area {a}")
    return s.scaled(a ** -0.5)


def periods(s: TranslationSurface) -> PeriodMatrix:
    """Period matrix over the deterministic relative homology basis.

    Implemented in :mod:`tsf.homology`; re-exported here as the natural home
    of the operation.
    """
    from . import homology

    return homology.periods(s)


# ---------------------------------------------------------------------------
# cached derived data (surfaces are frozen and hashable)
# ---------------------------------------------------------------------------


@lru_cache(maxsize=256)
def _cached_vertex_class_ids(s: TranslationSurface) -> dict[tuple[int, int], int]:
    """Map corner -> vertex class id (classes ordered by smallest corner)."""
    orbits = _corner_orbits(s)
    orbits.sort(key=lambda orbit: min(orbit))
    out: dict[tuple[int, int], int] = {}
    for cid, orbit in enumerate(orbits):
        for corner in orbit:
            out[corner] = cid
    return out


def corner_class_ids(s: TranslationSurface) -> dict[tuple[int, int], int]:
    return _cached_vertex_class_ids(s)
