"""Vectorized straight-line search engines on the triangulated model.

Two batch algorithms run on :class:`tsf._mesh.Mesh` tables:

* window search: breadth-first development of angular windows around every
  cone/marked point, enumerating all saddle connections of length <= L.  A
  window is an open angular sector seen from the source vertex through a
  side of a developed triangle; hitting the opposite vertex splits it, and
  the first vertex on a ray blocks everything behind it.  Pending windows
  are coalesced into large batches so the numpy work stays amortized.

* probe flow: straight-line flow of points seeded on the left of every
  saddle connection.  A probe that returns to its first edge crossing
  closes a periodic orbit.  While flowing, the probe tracks the interval of
  transversal offsets whose parallels share its itinerary; at closure this
  is the maximal band of closed orbits around the probe (a cylinder, or a
  sub-band of one when marked points lie on its boundary lines).  The
  binding vertex classes of both interval ends and a chart-independent
  anchor are tracked online, so a single pass suffices.

Marked points (cone angle 2*pi) do not stop the flow; bands separated by a
line carrying only marked points are merged into maximal cylinders.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._mesh import Mesh
from .errors import CapExceeded

_CHUNK = 200_000
_ANG_EPS = 1e-12   # relative tolerance for on-ray tests
_BIND_TOL = 1e-9   # transversal tolerance for binding constraints
_BIG = np.iinfo(np.int64).max


def _cross(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _norm(a):
    return np.hypot(a[..., 0], a[..., 1])


@dataclass
class SCSet:
    """Saddle-connection discoveries (one row per discovery, pre-dedup)."""

    src: np.ndarray       # source vertex class
    dst: np.ndarray       # target vertex class
    hol: np.ndarray       # (N,2) holonomy
    seed_tri: np.ndarray  # triangle of the starting corner
    seed_cor: np.ndarray  # corner index of the starting corner

    def __len__(self):
        return len(self.src)


# ---------------------------------------------------------------------------
# window search
# ---------------------------------------------------------------------------


def _concat_states(states):
    if len(states) == 1:
        return states[0]
    keys = states[0].keys()
    return {
        k: np.concatenate([s[k] for s in states], axis=0) for k in keys
    }


def saddle_connection_search(
    mesh: Mesh, lmax: float, node_cap: int = 20_000_000_000
) -> SCSet:
    """All saddle connections of length <= lmax (every discovery kept)."""
    xy = mesh.xy
    T = mesh.n_tris

    rec: list[tuple[np.ndarray, ...]] = []

    def record(src, dst, hol, stri, scor):
        if len(src):
            rec.append((src, dst, hol, stri, scor))

    t0 = np.repeat(np.arange(T), 3)
    k0 = np.tile(np.arange(3), T)
    apex = xy[t0, k0]
    k1 = (k0 + 1) % 3
    k2 = (k0 + 2) % 3
    q1 = xy[t0, k1] - apex
    q2 = xy[t0, k2] - apex
    src0 = mesh.vclass[t0, k0]

    for q, kk in ((q1, k1), (q2, k2)):
        keep = _norm(q) <= lmax
        record(src0[keep], mesh.vclass[t0[keep], kk[keep]], q[keep],
               t0[keep], k0[keep])

    state = {
        "tri": mesh.neighbor[t0, k1],
        "ent": mesh.nb_side[t0, k1],
        "off": -apex + mesh.shift[t0, k1],
        "lo": q1,
        "hi": q2,
        "src": src0,
        "stri": t0,
        "scor": k0,
    }
    state = _prune_gate(state, q1, q2, lmax)

    pending = [state]
    nodes = 0
    while pending:
        batch = [pending.pop()]
        total = len(batch[0]["tri"])
        while pending and total < _CHUNK:
            nxt = pending.pop()
            batch.append(nxt)
            total += len(nxt["tri"])
        st = _concat_states(batch)
        n = len(st["tri"])
        if n == 0:
            continue
        nodes += n
        if nodes > node_cap:
            raise CapExceeded(
                f"saddle-connection search exceeded {node_cap} windows"
            )

        tri, ent, off = st["tri"], st["ent"], st["off"]
        lo, hi = st["lo"], st["hi"]
        e1 = (ent + 1) % 3
        e2 = (ent + 2) % 3
        p = xy[tri, e2] + off
        s_lo = xy[tri, e1] + off
        s_hi = xy[tri, ent] + off

        npv = _norm(p)
        c_lo = _cross(lo, p)
        c_hi = _cross(p, hi)
        tol_lo = _ANG_EPS * _norm(lo) * npv
        tol_hi = _ANG_EPS * _norm(hi) * npv
        inside = (c_lo > tol_lo) & (c_hi > tol_hi)
        before = ~inside & (c_lo <= tol_lo)
        after = ~inside & ~before

        keep = inside & (npv <= lmax)
        record(st["src"][keep], mesh.vclass[tri[keep], e2[keep]], p[keep],
               st["stri"][keep], st["scor"][keep])

        for mask, gate, wlo, whi, g1, g2 in (
            (inside, e1, lo, p, s_lo, p),
            (inside, e2, p, hi, p, s_hi),
            (before, e2, lo, hi, p, s_hi),
            (after, e1, lo, hi, s_lo, p),
        ):
            idx = np.flatnonzero(mask)
            if not len(idx):
                continue
            gi = gate[idx]
            ti = tri[idx]
            child = {
                "tri": mesh.neighbor[ti, gi],
                "ent": mesh.nb_side[ti, gi],
                "off": off[idx] + mesh.shift[ti, gi],
                "lo": wlo[idx],
                "hi": whi[idx],
                "src": st["src"][idx],
                "stri": st["stri"][idx],
                "scor": st["scor"][idx],
            }
            child = _prune_gate(child, g1[idx], g2[idx], lmax)
            if len(child["tri"]):
                pending.append(child)

    if not rec:
        z = np.zeros(0, dtype=np.int64)
        return SCSet(z, z, np.zeros((0, 2)), z, z)
    return SCSet(
        src=np.concatenate([r[0] for r in rec]),
        dst=np.concatenate([r[1] for r in rec]),
        hol=np.concatenate([r[2] for r in rec], axis=0),
        seed_tri=np.concatenate([r[3] for r in rec]),
        seed_cor=np.concatenate([r[4] for r in rec]),
    )


def _prune_gate(st, g1, g2, lmax):
    """Keep windows that are nondegenerate and whose clipped gate segment
    comes within lmax of the source."""
    lo, hi = st["lo"], st["hi"]
    ok = _cross(lo, hi) > _ANG_EPS * _norm(lo) * _norm(hi)

    d12 = g2 - g1

    def clip(ray, default):
        c1 = _cross(ray, g1)
        c2 = _cross(ray, g2)
        den = c1 - c2
        t = np.where(np.abs(den) > 0, c1 / np.where(den == 0, 1.0, den), default)
        return np.clip(t, 0.0, 1.0)

    tlo = clip(lo, 0.0)
    thi = clip(hi, 1.0)
    qlo = g1 + tlo[:, None] * d12
    qhi = g1 + thi[:, None] * d12
    seg = qhi - qlo
    seglen2 = seg[..., 0] ** 2 + seg[..., 1] ** 2
    f = np.where(
        seglen2 > 0,
        -(qlo[..., 0] * seg[..., 0] + qlo[..., 1] * seg[..., 1])
        / np.where(seglen2 == 0, 1.0, seglen2),
        0.0,
    )
    f = np.clip(f, 0.0, 1.0)
    near = qlo + f[:, None] * seg
    ok &= _norm(near) <= lmax
    return {k: v[ok] for k, v in st.items()}


# ---------------------------------------------------------------------------
# probe flow
# ---------------------------------------------------------------------------


@dataclass
class Band:
    """A maximal band of parallel closed orbits with one itinerary."""

    direction: tuple[float, float]  # unit vector, canonical sign
    waist: float
    height: float
    lo_mask: int   # bitmask of classes on the lower boundary line
    hi_mask: int
    anchor: tuple  # chart-independent identity (canonical side, interval)


def _corner_angles(mesh):
    """Cumulative angle of each triangle corner around its vertex class.

    Walking counterclockwise around the class from a deterministic start
    corner, ``cum[t, k]`` is the total angle before corner (t, k); a ray at
    angle a inside corner (t, k) sits at cone position cum[t, k] + a.
    """
    T = mesh.n_tris
    cum = np.zeros((T, 3))
    cls = np.zeros((T, 3), dtype=np.int64)
    v1 = mesh.xy[:, [1, 2, 0], :] - mesh.xy          # outgoing side at corner k
    v2 = mesh.xy[:, [2, 0, 1], :] - mesh.xy          # towards third vertex
    ang = np.arctan2(_cross(v1, v2), np.sum(v1 * v2, axis=-1))
    ang = np.where(ang < 0, ang + 2 * np.pi, ang)

    seen = np.zeros((T, 3), dtype=bool)
    for t0 in range(T):
        for k0 in range(3):
            if seen[t0, k0]:
                continue
            # collect the corner orbit, then start it at its min corner
            orbit = []
            t, k = t0, k0
            while not seen[t, k]:
                seen[t, k] = True
                orbit.append((t, k))
                side = (k + 2) % 3
                t, k = int(mesh.neighbor[t, side]), int(mesh.nb_side[t, side])
            start = orbit.index(min(orbit))
            orbit = orbit[start:] + orbit[:start]
            acc = 0.0
            for t, k in orbit:
                cum[t, k] = acc
                cls[t, k] = mesh.vclass[t, k]
                acc += ang[t, k]
    return cum, cls


def _exit_crossings(mesh, tri, ent, pos, u):
    """One flow step: exit side, parameter and travel time for each row."""
    xy = mesh.xy
    n = len(tri)
    best_t = np.full(n, np.inf)
    best_j = np.full(n, -1, dtype=np.int64)
    best_s = np.zeros(n)
    for dj in (1, 2):
        j = (ent + dj) % 3
        e1 = xy[tri, j]
        e2 = xy[tri, (j + 1) % 3]
        w = e2 - e1
        den = _cross(u, w)
        safe = np.abs(den) > 1e-15
        tc = np.where(safe, _cross(e1 - pos, w) / np.where(safe, den, 1.0), np.inf)
        tcs = np.where(safe, tc, 0.0)
        xc = pos + tcs[:, None] * u
        use_x = np.abs(w[:, 0]) > np.abs(w[:, 1])
        ss = np.where(
            use_x,
            (xc[:, 0] - e1[:, 0]) / np.where(w[:, 0] == 0, 1.0, w[:, 0]),
            (xc[:, 1] - e1[:, 1]) / np.where(w[:, 1] == 0, 1.0, w[:, 1]),
        )
        good = safe & (tc > 0) & (ss > -1e-9) & (ss < 1 + 1e-9) & (tc < best_t)
        best_t = np.where(good, tc, best_t)
        best_j = np.where(good, j, best_j)
        best_s = np.where(good, np.clip(ss, 0.0, 1.0), best_s)
    return best_t, best_j, best_s


def _exit_interior(mesh, tri, pos, u):
    """First crossing when starting strictly inside a triangle."""
    xy = mesh.xy
    n = len(tri)
    best_t = np.full(n, np.inf)
    best_j = np.full(n, -1, dtype=np.int64)
    best_s = np.zeros(n)
    for j3 in range(3):
        j = np.full(n, j3, dtype=np.int64)
        e1 = xy[tri, j3]
        e2 = xy[tri, (j3 + 1) % 3]
        w = e2 - e1
        den = _cross(u, w)
        safe = np.abs(den) > 1e-15
        tc = np.where(safe, _cross(e1 - pos, w) / np.where(safe, den, 1.0), np.inf)
        tcs = np.where(safe, tc, 0.0)
        xc = pos + tcs[:, None] * u
        use_x = np.abs(w[:, 0]) > np.abs(w[:, 1])
        ss = np.where(
            use_x,
            (xc[:, 0] - e1[:, 0]) / np.where(w[:, 0] == 0, 1.0, w[:, 0]),
            (xc[:, 1] - e1[:, 1]) / np.where(w[:, 1] == 0, 1.0, w[:, 1]),
        )
        good = safe & (tc > 1e-15) & (ss > -1e-12) & (ss < 1 + 1e-12) & (tc < best_t)
        best_t = np.where(good, tc, best_t)
        best_j = np.where(good, j, best_j)
        best_s = np.where(good, np.clip(ss, 0.0, 1.0), best_s)
    return best_t, best_j, best_s


def probe_cylinders(
    mesh: Mesh,
    sc: SCSet,
    lmax: float,
    iter_cap: int = 1_000_000,
) -> list[Band]:
    """All periodic bands of waist <= lmax, deduplicated (pre-merge).

    One probe per saddle-connection discovery, offset to its left; every
    cylinder is adjacent on the left of the saddle connections of its lower
    boundary, so left probes see every band.
    """
    if mesh.n_classes > 62:
        raise CapExceeded("band detection supports at most 62 vertex classes")
    if len(sc) == 0:
        return []

    # One probe per outgoing ray of the cone: a ray is (class, angular
    # position on the cone), computed from the seed corner's cumulative
    # angle in the corner walk around its vertex class.  Saddle connections
    # sharing a ray (rediscoveries from sibling corners) seed one probe.
    udir = sc.hol / _norm(sc.hol)[:, None]
    cum, cls = _corner_angles(mesh)
    base = mesh.xy[sc.seed_tri, (sc.seed_cor + 1) % 3] - mesh.xy[sc.seed_tri, sc.seed_cor]
    rel = np.arctan2(_cross(base, udir), base[:, 0] * udir[:, 0] + base[:, 1] * udir[:, 1])
    rel = np.where(rel < -1e-9, rel + 2 * np.pi, np.maximum(rel, 0.0))
    ray_pos = cum[sc.seed_tri, sc.seed_cor] + rel
    key = np.stack(
        [
            sc.src,
            np.round(ray_pos / 1e-7).astype(np.int64),
        ],
        axis=1,
    )
    _, uniq = np.unique(key, axis=0, return_index=True)
    tri0 = sc.seed_tri[uniq]
    cor0 = sc.seed_cor[uniq]
    u = udir[uniq]

    sides = mesh.xy[:, [1, 2, 0], :] - mesh.xy
    tri_minside = _norm(sides).min(axis=1)
    local = tri_minside[tri0]
    delta = 1e-3 * local
    eps = 1e-6 * local
    nvec = np.stack([-u[:, 1], u[:, 0]], axis=1)
    p0 = mesh.xy[tri0, cor0] + delta[:, None] * u + eps[:, None] * nvec

    a = mesh.xy[tri0]
    ok = np.ones(len(p0), dtype=bool)
    for j in range(3):
        e1 = a[:, j]
        e2 = a[:, (j + 1) % 3]
        ok &= _cross(e2 - e1, p0 - e1) > 0
    tri0, u, p0 = tri0[ok], u[ok], p0[ok]
    if len(p0) == 0:
        return []

    best_t, best_j, best_s = _exit_interior(mesh, tri0, p0, u)
    alive = best_j >= 0
    tri0, u, p0 = tri0[alive], u[alive], p0[alive]
    best_t, best_j, best_s = best_t[alive], best_j[alive], best_s[alive]
    if len(p0) == 0:
        return []

    cid0 = mesh.canon_id[tri0, best_j]
    s0c = np.where(mesh.canon_flip[tri0, best_j], 1.0 - best_s, best_s)
    pos = p0 + best_t[:, None] * u - mesh.shift[tri0, best_j]
    tri = mesh.neighbor[tri0, best_j]
    ent = mesh.nb_side[tri0, best_j]

    bands = _flow_bands(mesh, tri, ent, pos, u, cid0, s0c, lmax, iter_cap)
    return _dedup_bands(bands)


def _flow_bands(mesh, tri, ent, pos, u, cid0, s0, lmax, iter_cap) -> list[Band]:
    """Fused probe flow: closure detection plus online band tracking."""
    n = len(tri)
    length = np.zeros(n)
    lo = np.full(n, -np.inf)
    hi = np.full(n, np.inf)
    lo_mask = np.zeros(n, dtype=np.int64)
    hi_mask = np.zeros(n, dtype=np.int64)
    acid = np.full(n, _BIG, dtype=np.int64)
    asc = np.full(n, np.inf)
    agc = np.zeros(n)

    tol_bind = _BIND_TOL * max(mesh.scale, 1.0)
    tol_tau = 1e-9 * max(mesh.scale, 1.0)
    lcap = lmax * (1 + 1e-9) + 1e-12

    out: list[dict] = []
    active = np.arange(n)
    tri, ent, pos, u_act = tri.copy(), ent.copy(), pos.copy(), u.copy()
    it = 0
    while len(active):
        it += 1
        if it > iter_cap:
            raise CapExceeded("probe flow exceeded the iteration cap")
        best_t, best_j, best_s = _exit_crossings(mesh, tri, ent, pos, u_act)
        dead = best_j < 0
        jj = np.where(dead, 0, best_j)

        e1 = mesh.xy[tri, jj]
        e2 = mesh.xy[tri, (jj + 1) % 3]
        w = e2 - e1
        den = _cross(u_act, w)
        wlen = _norm(w)
        g = np.where(den == 0, np.inf, 1.0 / np.where(den == 0, 1.0, den))

        # interval constraints from this crossing: tau = (s' - s) * den
        t_a = -best_s * den
        t_b = (1.0 - best_s) * den
        pos_g = den > 0
        cand_lo = np.where(pos_g, t_a, t_b)
        cand_hi = np.where(pos_g, t_b, t_a)
        cls_lo = np.where(pos_g, mesh.vclass[tri, jj], mesh.vclass[tri, (jj + 1) % 3])
        cls_hi = np.where(pos_g, mesh.vclass[tri, (jj + 1) % 3], mesh.vclass[tri, jj])
        cand_lo = np.where(dead, -np.inf, cand_lo)
        cand_hi = np.where(dead, np.inf, cand_hi)

        la = lo[active]
        newlo = np.maximum(la, cand_lo)
        m_old = np.where(la >= newlo - tol_bind, lo_mask[active], 0)
        m_new = np.where(cand_lo >= newlo - tol_bind, 1 << cls_lo, 0)
        lo[active] = newlo
        lo_mask[active] = m_old | m_new

        ha = hi[active]
        newhi = np.minimum(ha, cand_hi)
        m_old = np.where(ha <= newhi + tol_bind, hi_mask[active], 0)
        m_new = np.where(cand_hi <= newhi + tol_bind, 1 << cls_hi, 0)
        hi[active] = newhi
        hi_mask[active] = m_old | m_new

        # online anchor: order by probe-relative parameter is the order of
        # the final interval positions (bands on one side are disjoint)
        cid = mesh.canon_id[tri, jj]
        s_c = np.where(mesh.canon_flip[tri, jj], 1.0 - best_s, best_s)
        g_c = np.where(mesh.canon_flip[tri, jj], -g, g)
        cond = np.isfinite(g) & (np.abs(g) * wlen <= 20.0) & ~dead
        cand_cid = np.where(cond, cid, _BIG)
        better = (cand_cid < acid[active]) | (
            (cand_cid == acid[active]) & (s_c < asc[active] - 1e-12) & cond
        )
        acid[active] = np.where(better, cand_cid, acid[active])
        asc[active] = np.where(better, s_c, asc[active])
        agc[active] = np.where(better, g_c, agc[active])

        newlen = length[active] + best_t
        is_closed = (
            ~dead
            & (cid == cid0[active])
            & (np.abs(s_c - s0[active]) * wlen < tol_tau)
            & (newlen > tol_tau)
        )
        over = ~dead & ~is_closed & (newlen > lcap)

        if is_closed.any():
            rows = np.flatnonzero(is_closed)
            gidx = active[rows]
            out.append(
                {
                    "u": u[gidx],
                    "waist": newlen[rows],
                    "lo": lo[gidx],
                    "hi": hi[gidx],
                    "lo_mask": lo_mask[gidx],
                    "hi_mask": hi_mask[gidx],
                    "acid": acid[gidx],
                    # lower endpoint of the anchor-side interval
                    "aiv": asc[gidx]
                    + np.where(agc[gidx] > 0, lo[gidx], hi[gidx]) * agc[gidx],
                }
            )

        go = ~(dead | is_closed | over)
        length[active] = newlen
        gi = np.flatnonzero(go)
        jg = best_j[gi]
        tg = tri[gi]
        pos = pos[gi] + best_t[gi][:, None] * u_act[gi] - mesh.shift[tg, jg]
        tri = mesh.neighbor[tg, jg]
        ent = mesh.nb_side[tg, jg]
        u_act = u_act[gi]
        active = active[gi]

    if not out:
        return []
    res = {k: np.concatenate([c[k] for c in out], axis=0) for k in out[0]}
    ok = (
        np.isfinite(res["lo"])
        & np.isfinite(res["hi"])
        & (res["hi"] > res["lo"])
        & (res["acid"] != _BIG)
    )
    res = {k: v[ok] for k, v in res.items()}

    # canonicalize directions (sign of the first nonzero component)
    ux = res["u"][:, 0]
    uy = res["u"][:, 1]
    flip = (ux < -1e-12) | ((np.abs(ux) <= 1e-12) & (uy < 0))
    ux = np.where(flip, -ux, ux) + 0.0
    uy = np.where(flip, -uy, uy) + 0.0
    lo_mask = np.where(flip, res["hi_mask"], res["lo_mask"])
    hi_mask = np.where(flip, res["lo_mask"], res["hi_mask"])

    bands = []
    for i in range(len(ux)):
        bands.append(
            Band(
                direction=(float(ux[i]), float(uy[i])),
                waist=float(res["waist"][i]),
                height=float(res["hi"][i] - res["lo"][i]),
                lo_mask=int(lo_mask[i]),
                hi_mask=int(hi_mask[i]),
                anchor=(int(res["acid"][i]), float(res["aiv"][i])),
            )
        )
    return bands


def _dedup_bands(bands: list[Band]) -> list[Band]:
    """Collapse multiple probes of the same band.

    Bands are identified by (anchor side, direction, anchor interval
    position); gap clustering keeps this stable against float noise.
    """
    if not bands:
        return bands

    def ang(b):
        return float(np.arctan2(b.direction[1], b.direction[0]))

    bands = sorted(bands, key=lambda b: (b.anchor[0], ang(b), b.anchor[1]))
    out = [bands[0]]
    for b in bands[1:]:
        prev = out[-1]
        if (
            b.anchor[0] == prev.anchor[0]
            and abs(ang(b) - ang(prev)) < 1e-8
            and abs(b.anchor[1] - prev.anchor[1]) < 1e-7
        ):
            continue
        out.append(b)
    return out


# ---------------------------------------------------------------------------
# band merging
# ---------------------------------------------------------------------------


@dataclass
class CylinderData:
    direction: tuple[float, float]
    waist: float
    height: float
    boundary_mask: int  # classes on the bounding lines


def merge_bands(mesh: Mesh, bands: list[Band]) -> list[CylinderData]:
    """Merge bands separated by marked-point lines into maximal cylinders.

    Within one direction, band A is continued by band B when A's upper
    boundary line equals B's lower boundary line and that line carries only
    marked points; a line is identified by the set of classes on it.
    """
    if not bands:
        return []
    marked_mask = 0
    for c in range(mesh.n_classes):
        if mesh.class_turns[c] == 1:
            marked_mask |= 1 << c

    angs = np.array([np.arctan2(b.direction[1], b.direction[0]) for b in bands])
    order = np.argsort(angs)
    cluster = np.zeros(len(bands), dtype=np.int64)
    cid = 0
    for rank, i in enumerate(order):
        if rank > 0 and angs[i] - angs[order[rank - 1]] > 1e-8:
            cid += 1
        cluster[i] = cid

    out: list[CylinderData] = []
    for c in range(cid + 1):
        group = [bands[i] for i in np.flatnonzero(cluster == c)]
        out.extend(_merge_direction(group, marked_mask))
    return out


def _merge_direction(group: list[Band], marked_mask: int) -> list[CylinderData]:
    def mergeable(mask: int) -> bool:
        return mask != 0 and (mask & ~marked_mask) == 0

    by_lo: dict[int, int] = {}
    for i, b in enumerate(group):
        by_lo.setdefault(b.lo_mask, i)

    succ = [-1] * len(group)
    pred = [-1] * len(group)
    for i, b in enumerate(group):
        if not mergeable(b.hi_mask):
            continue
        j = by_lo.get(b.hi_mask, -1)
        if j >= 0 and j != i and abs(group[j].waist - b.waist) < 1e-6:
            succ[i] = j
            pred[j] = i

    seen = [False] * len(group)
    out = []
    for i in range(len(group)):  # chains
        if seen[i] or pred[i] >= 0:
            continue
        height = 0.0
        boundary = group[i].lo_mask
        j = i
        last = i
        while j >= 0 and not seen[j]:
            seen[j] = True
            height += group[j].height
            last = j
            j = succ[j]
        boundary |= group[last].hi_mask
        out.append(
            CylinderData(group[i].direction, group[i].waist, height, boundary)
        )
    for i in range(len(group)):  # wrap-around cycles
        if seen[i]:
            continue
        height = 0.0
        boundary = 0
        j = i
        while not seen[j]:
            seen[j] = True
            height += group[j].height
            boundary |= group[j].lo_mask | group[j].hi_mask
            j = succ[j]
        out.append(
            CylinderData(group[i].direction, group[i].waist, height, boundary)
        )
    return out
