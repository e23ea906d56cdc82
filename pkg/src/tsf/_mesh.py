"""Internal triangulated model of a surface for geometric searches.

Every polygon is ear-clipped into triangles that inherit the polygon's
chart.  Crossing a triangle side either stays in the same chart (interior
diagonal) or applies the gluing translation.  The straight-line flow and
the saddle-connection search both run on this table-driven structure.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ValidationError
from .surface import TranslationSurface, corner_class_ids, require_valid, validate_surface


def ear_clip(verts: list[tuple[float, float]]) -> list[tuple[int, int, int]]:
    """Triangulate a simple CCW polygon; returns index triples (CCW)."""
    n = len(verts)
    if n < 3:
        raise ValidationError("polygon with fewer than 3 vertices")
    idx = list(range(n))
    out: list[tuple[int, int, int]] = []
    scale = max(max(abs(x), abs(y)) for x, y in verts) or 1.0
    eps = 1e-12 * scale * scale

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    def inside(p, a, b, c):
        d1 = cross(a, b, p)
        d2 = cross(b, c, p)
        d3 = cross(c, a, p)
        return d1 >= -eps and d2 >= -eps and d3 >= -eps

    guard = 0
    while len(idx) > 3:
        guard += 1
        if guard > 10000:
            raise ValidationError("ear clipping did not terminate")
        clipped = False
        for pos in range(len(idx)):
            i0 = idx[(pos - 1) % len(idx)]
            i1 = idx[pos]
            i2 = idx[(pos + 1) % len(idx)]
            a, b, c = verts[i0], verts[i1], verts[i2]
            if cross(a, b, c) <= eps:
                continue  # reflex or degenerate corner
            if any(
                inside(verts[j], a, b, c)
                for j in idx
                if j not in (i0, i1, i2)
            ):
                continue
            out.append((i0, i1, i2))
            idx.pop(pos)
            clipped = True
            break
        if not clipped:
            raise ValidationError("ear clipping failed (degenerate polygon?)")
    out.append((idx[0], idx[1], idx[2]))
    return out


@dataclass
class Mesh:
    """Triangle tables; arrays are indexed [triangle, corner-or-side]."""

    xy: np.ndarray        # (T, 3, 2) vertex chart positions
    vclass: np.ndarray    # (T, 3) vertex class ids
    neighbor: np.ndarray  # (T, 3) triangle across side j (side j: v_j -> v_{j+1})
    nb_side: np.ndarray   # (T, 3) matching side index in the neighbor
    shift: np.ndarray     # (T, 3, 2) chart translation of the neighbor into
    #                       this chart (x_here = x_neighbor + shift)
    class_turns: np.ndarray  # (n_classes,) cone angle in full turns
    n_classes: int
    min_edge: float
    scale: float
    canon_id: np.ndarray = None   # (T,3) canonical id of the side's gluing slot
    canon_flip: np.ndarray = None  # (T,3) slot parameterization reversed

    @property
    def n_tris(self) -> int:
        return len(self.xy)


@lru_cache(maxsize=64)
def build_mesh(s: TranslationSurface) -> Mesh:
    require_valid(s)
    class_of = corner_class_ids(s)
    report = validate_surface(s)
    turns = np.array([round(t) for t in report.cone_angles], dtype=np.int64)

    tris: list[tuple[int, tuple[int, int, int]]] = []
    for p, poly in enumerate(s.polygons):
        for tri in ear_clip(list(poly)):
            tris.append((p, tri))

    T = len(tris)
    xy = np.zeros((T, 3, 2))
    vclass = np.zeros((T, 3), dtype=np.int64)
    neighbor = np.full((T, 3), -1, dtype=np.int64)
    nb_side = np.full((T, 3), -1, dtype=np.int64)
    shift = np.zeros((T, 3, 2))

    edge_slot: dict[tuple[int, int], tuple[int, int]] = {}
    diag_slot: dict[tuple[int, int, int], list[tuple[int, int]]] = {}

    for t, (p, tri) in enumerate(tris):
        poly = s.polygons[p]
        n = len(poly)
        for k in range(3):
            xy[t, k] = poly[tri[k]]
            vclass[t, k] = class_of[(p, tri[k])]
        for j in range(3):
            a, b = tri[j], tri[(j + 1) % 3]
            if (a + 1) % n == b:
                edge_slot[(p, a)] = (t, j)
            else:
                diag_slot.setdefault((p, min(a, b), max(a, b)), []).append((t, j))

    for key, slots in diag_slot.items():
        if len(slots) != 2:
            raise ValidationError(f"triangulation diagonal {key} not shared by 2 triangles")
        (t1, j1), (t2, j2) = slots
        neighbor[t1, j1], nb_side[t1, j1] = t2, j2
        neighbor[t2, j2], nb_side[t2, j2] = t1, j1

    for (pa, ia), (pb, ib) in s.gluings:
        ta, ja = edge_slot[(pa, ia)]
        tb, jb = edge_slot[(pb, ib)]
        neighbor[ta, ja], nb_side[ta, ja] = tb, jb
        neighbor[tb, jb], nb_side[tb, jb] = ta, ja
        na = len(s.polygons[pa])
        nb_ = len(s.polygons[pb])
        a_start = np.array(s.polygons[pa][ia])
        b_end = np.array(s.polygons[pb][(ib + 1) % nb_])
        b_start = np.array(s.polygons[pb][ib])
        a_end = np.array(s.polygons[pa][(ia + 1) % na])
        shift[ta, ja] = a_start - b_end
        shift[tb, jb] = b_start - a_end

    if np.any(neighbor < 0):
        raise ValidationError("mesh has unmatched sides")

    sides = xy[:, [1, 2, 0], :] - xy  # side j vector
    lens = np.hypot(sides[..., 0], sides[..., 1])
    slot = np.arange(T)[:, None] * 3 + np.arange(3)[None, :]
    other = neighbor * 3 + nb_side
    canon = np.minimum(slot, other)
    return Mesh(
        xy=xy,
        vclass=vclass,
        neighbor=neighbor,
        nb_side=nb_side,
        shift=shift,
        class_turns=turns,
        n_classes=len(turns),
        min_edge=float(lens.min()),
        scale=float(np.abs(xy).max() or 1.0),
        canon_id=canon,
        canon_flip=slot != canon,
    )
