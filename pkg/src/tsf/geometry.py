"""Metric geometry: saddle connections, systole, cylinders.

Saddle connections join distinguished points (cone points and marked
points) and may not pass through one.  Cylinders are maximal flat annuli of
closed geodesics; marked points do not bound them, so a genus-1 surface has
exactly one cylinder per unordered pair of opposite primitive directions of
its period lattice (waist = vector length, height = area / waist).

``cylinders`` exposes both computation paths:

* ``"develop"`` — the generic search (saddle connections, probe flow, band
  merge) on the triangulated model; works in every genus;
* ``"lattice"`` — the genus-1 arithmetic path via the reduced period
  lattice;
* ``"auto"`` — lattice when genus is 1, develop otherwise.

The two paths are cross-checked against each other in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _develop
from ._mesh import build_mesh
from .errors import CapExceeded, ValidationError
from .sl2 import gauss_reduce
from .surface import TranslationSurface, area, periods, require_valid


@dataclass(frozen=True)
class SaddleConnection:
    holonomy: tuple[float, float]
    endpoints: tuple[int, int]  # (source class, target class)

    @property
    def length(self) -> float:
        return math.hypot(*self.holonomy)


@dataclass(frozen=True)
class Cylinder:
    direction: tuple[float, float]  # unit vector, canonical sign
    waist: float
    height: float
    boundary: tuple[SaddleConnection, ...] = ()

    @property
    def area(self) -> float:
        return self.waist * self.height


def _dedup_sc(sc: _develop.SCSet) -> np.ndarray:
    """Representative rows per (source, target, holonomy) with 1e-9 slack."""
    if len(sc) == 0:
        return np.zeros(0, dtype=np.int64)
    order = np.lexsort((sc.hol[:, 1], sc.hol[:, 0], sc.dst, sc.src))
    src = sc.src[order]
    dst = sc.dst[order]
    h = sc.hol[order]
    new = np.ones(len(order), dtype=bool)
    same = (
        (src[1:] == src[:-1])
        & (dst[1:] == dst[:-1])
        & (np.abs(h[1:, 0] - h[:-1, 0]) <= 1e-9)
        & (np.abs(h[1:, 1] - h[:-1, 1]) <= 1e-9)
    )
    new[1:] = ~same
    return order[new]


@lru_cache(maxsize=32)
def _sc_search_cached(s: TranslationSurface, lmax: float):
    mesh = build_mesh(s)
    return mesh, _develop.saddle_connection_search(mesh, lmax)


def saddle_connections(s: TranslationSurface, lmax: float) -> list[SaddleConnection]:
    """All saddle connections of length <= lmax, deduplicated and sorted."""
    require_valid(s)
    if lmax <= 0:
        raise ValidationError("lmax must be positive")
    _, sc = _sc_search_cached(s, float(lmax))
    rows = _dedup_sc(sc)
    out = [
        SaddleConnection(
            holonomy=(float(sc.hol[i, 0]), float(sc.hol[i, 1])),
            endpoints=(int(sc.src[i]), int(sc.dst[i])),
        )
        for i in rows
    ]
    out.sort(key=lambda c: (c.length, c.holonomy, c.endpoints))
    return out


def systole(s: TranslationSurface) -> float:
    """Length of the shortest saddle connection.

    Expanding-radius search: the initial radius is the shortest
    triangulation edge (itself a saddle connection), so the first round is
    already nonempty; the radius doubles until the search succeeds.
    """
    require_valid(s)
    mesh = build_mesh(s)
    lmax = mesh.min_edge * (1.0 + 1e-12)
    for _ in range(64):
        sc = _develop.saddle_connection_search(mesh, lmax)
        if len(sc):
            return float(np.hypot(sc.hol[:, 0], sc.hol[:, 1]).min())
        lmax *= 2.0
    raise CapExceeded("systole search did not converge")


# ---------------------------------------------------------------------------
# cylinders
# ---------------------------------------------------------------------------


def _lattice_basis(s: TranslationSurface):
    pm = periods(s)
    if pm.genus != 1:
        raise ValidationError("lattice path requires genus 1")
    v1, v2, _ = gauss_reduce(pm.column(0), pm.column(1))
    det = abs(v1[0] * v2[1] - v1[1] * v2[0])
    if det < 1e-12:
        raise ValidationError("degenerate period lattice")
    return np.array(v1), np.array(v2), det


def _lattice_cylinders(s: TranslationSurface, lmax: float):
    """(directions, waists, heights) of the genus-1 cylinders, one per
    unordered primitive direction pair with waist <= lmax."""
    v1, v2, det = _lattice_basis(s)
    n1 = np.hypot(*v1)
    n2 = np.hypot(*v2)
    pmax = int(lmax * n2 / det) + 1
    qmax = int(lmax * n1 / det) + 1
    p = np.arange(-pmax, pmax + 1)
    q = np.arange(-qmax, qmax + 1)
    pp, qq = np.meshgrid(p, q, indexing="ij")
    pp = pp.ravel()
    qq = qq.ravel()
    keep = (pp != 0) | (qq != 0)
    pp, qq = pp[keep], qq[keep]
    keep = np.gcd(np.abs(pp), np.abs(qq)) == 1
    pp, qq = pp[keep], qq[keep]
    wx = pp * v1[0] + qq * v2[0]
    wy = pp * v1[1] + qq * v2[1]
    wl = np.hypot(wx, wy)
    keep = wl <= lmax
    wx, wy, wl = wx[keep], wy[keep], wl[keep]
    canon = (wx > 1e-12) | ((np.abs(wx) <= 1e-12) & (wy > 0))
    wx, wy, wl = wx[canon], wy[canon], wl[canon]
    order = np.lexsort((wy, wx, wl))
    wx, wy, wl = wx[order], wy[order], wl[order]
    dirs = np.stack([wx / wl, wy / wl], axis=1) + 0.0
    heights = det / wl
    return dirs, wl, heights


def _develop_cylinders(s: TranslationSurface, lmax: float):
    mesh, sc = _sc_search_cached(s, float(lmax))
    bands = _develop.probe_cylinders(mesh, sc, float(lmax))
    merged = _develop.merge_bands(mesh, bands)
    merged = [c for c in merged if c.waist <= lmax * (1 + 1e-12)]
    merged.sort(key=lambda c: (c.waist, c.direction))
    return mesh, sc, merged


def cylinder_data(s: TranslationSurface, lmax: float, method: str = "auto"):
    """(directions (N,2), waists (N,), heights (N,)) for all cylinders of
    waist <= lmax."""
    require_valid(s)
    if lmax <= 0:
        raise ValidationError("lmax must be positive")
    if method == "auto":
        method = "lattice" if periods(s).genus == 1 else "develop"
    if method == "lattice":
        return _lattice_cylinders(s, lmax)
    if method != "develop":
        raise ValueError(f"unknown method {method!r}")
    _, _, merged = _develop_cylinders(s, lmax)
    dirs = np.array([c.direction for c in merged]).reshape(-1, 2)
    waists = np.array([c.waist for c in merged])
    heights = np.array([c.height for c in merged])
    return dirs, waists, heights


def cylinder_waists(s: TranslationSurface, lmax: float, method: str = "auto") -> np.ndarray:
    """Sorted waists of all cylinders with waist <= lmax."""
    _, waists, _ = cylinder_data(s, lmax, method)
    return np.sort(waists)


def cylinders(s: TranslationSurface, lmax: float, method: str = "auto") -> list[Cylinder]:
    """All maximal cylinders of waist <= lmax, canonically ordered."""
    require_valid(s)
    if lmax <= 0:
        raise ValidationError("lmax must be positive")
    if method == "auto":
        method = "lattice" if periods(s).genus == 1 else "develop"
    if method == "lattice":
        dirs, waists, heights = _lattice_cylinders(s, lmax)
        out = []
        for d, w, h in zip(dirs, waists, heights):
            ux, uy = float(d[0]), float(d[1])
            sc_pos = SaddleConnection((ux * w, uy * w), (0, 0))
            sc_neg = SaddleConnection((-ux * w, -uy * w), (0, 0))
            out.append(
                Cylinder(
                    direction=(ux, uy),
                    waist=float(w),
                    height=float(h),
                    boundary=(sc_pos, sc_neg),
                )
            )
        return out

    mesh, sc, merged = _develop_cylinders(s, lmax)
    rows = _dedup_sc(sc)
    hol = sc.hol[rows]
    hln = np.hypot(hol[:, 0], hol[:, 1])
    uxy = hol / hln[:, None]
    out = []
    for c in merged:
        d = np.array(c.direction)
        par = np.abs(uxy[:, 0] * d[1] - uxy[:, 1] * d[0]) < 1e-9
        on_line = (
            par
            & (((1 << sc.src[rows]) & c.boundary_mask) != 0)
            & (((1 << sc.dst[rows]) & c.boundary_mask) != 0)
            & (hln <= c.waist * (1 + 1e-9))
        )
        bnd = tuple(
            SaddleConnection(
                (float(hol[i, 0]), float(hol[i, 1])),
                (int(sc.src[rows][i]), int(sc.dst[rows][i])),
            )
            for i in np.flatnonzero(on_line)
        )
        out.append(
            Cylinder(
                direction=(float(d[0]), float(d[1])),
                waist=float(c.waist),
                height=float(c.height),
                boundary=bnd,
            )
        )
    out.sort(key=lambda c: (c.waist, c.direction))
    return out
