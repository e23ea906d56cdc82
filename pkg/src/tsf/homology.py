"""Deterministic relative homology basis and period matrices.

The glued complex of a surface has one 2-cell per polygon, one 1-cell per
gluing pair and one 0-cell per vertex class.  Every vertex class is a
distinguished point, so relative 1-cycles are arbitrary 1-chains and

    rank H_1(complex, vertices) = E - F + 1 = 2g + V - 1.

The basis is built in two blocks:

* absolute block: a Z-basis of H_1 of the closed surface, reordered by an
  integer symplectic Gram-Schmidt so the intersection matrix is the standard
  block form diag([[0,1],[-1,0]], ...);
* relative block: spanning-tree arcs from vertex class 0 to every other
  class.

Everything is derived from the combinatorics alone (the intersection form is
computed by counting chord crossings of dual curves inside each polygon), so
two surfaces with identical polygons/gluings combinatorics get identical
basis chains and the same ``basis_tag``.  In particular period matrices are
exactly equivariant under the linear action on vertices.

All linear algebra is exact (python ints / fractions).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import BasisError
from .surface import PeriodMatrix, TranslationSurface, corner_class_ids, require_valid, stratum_of


# ---------------------------------------------------------------------------
# exact linear algebra helpers
# ---------------------------------------------------------------------------


def _rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (rows, pivot column indices)."""
    rows = [row[:] for row in rows]
    if not rows:
        return rows, []
    ncols = len(rows[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = Fraction(1, 1) / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                factor = rows[i][c]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def _rank(rows: list[list[Fraction]]) -> int:
    return len(_rref(rows)[1])


def _kernel_basis(rows: list[list[Fraction]], ncols: int) -> list[list[int]]:
    """Integer basis of the rational kernel of the given row system."""
    rref, pivots = _rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis: list[list[int]] = []
    for fc in free:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            vec[pc] = -rref[r][fc]
        den = 1
        for x in vec:
            den = den * x.denominator // _gcd(den, x.denominator)
        basis.append([int(x * den) for x in vec])
    return basis


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def _smith_quotient_basis(rel_rows: list[list[int]], m: int) -> list[list[int]]:
    """Basis of Z^m modulo the integer row span of ``rel_rows``.

    The quotient must be torsion free (true for the homology of a closed
    oriented surface); otherwise BasisError is raised.
    """
    if not rel_rows:
        return [[1 if j == i else 0 for j in range(m)] for i in range(m)]

    a = [row[:] for row in rel_rows]
    nrows = len(a)
    # vinv rows form the adapted basis of Z^m; maintained as V^{-1} under
    # the column operations applied to ``a``.
    vinv = [[1 if j == i else 0 for j in range(m)] for i in range(m)]

    def col_swap(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        vinv[i], vinv[j] = vinv[j], vinv[i]

    def col_add(j, q, i):  # col_j += q * col_i
        for row in a:
            row[j] += q * row[i]
        vinv[i] = [x - q * y for x, y in zip(vinv[i], vinv[j])]

    def col_neg(i):
        for row in a:
            row[i] = -row[i]
        vinv[i] = [-x for x in vinv[i]]

    def row_swap(i, j):
        a[i], a[j] = a[j], a[i]

    def row_add(j, q, i):  # row_j += q * row_i
        a[j] = [x + q * y for x, y in zip(a[j], a[i])]

    t = 0
    while t < min(nrows, m):
        best = None
        for i in range(t, nrows):
            for j in range(t, m):
                if a[i][j] != 0 and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        bi, bj = best
        if bi != t:
            row_swap(bi, t)
        if bj != t:
            col_swap(bj, t)
        # clear row t and column t
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, nrows):
                if a[i][t] != 0:
                    q = a[i][t] // a[t][t]
                    row_add(i, -q, t)
                    if a[i][t] != 0:
                        row_swap(i, t)
                        dirty = True
            for j in range(t + 1, m):
                if a[t][j] != 0:
                    q = a[t][j] // a[t][t]
                    col_add(j, -q, t)
                    if a[t][j] != 0:
                        col_swap(j, t)
                        dirty = True
        if a[t][t] < 0:
            col_neg(t)
        t += 1

    diag = [a[i][i] for i in range(min(nrows, m)) if i < m and a[i][i] != 0]
    if any(d != 1 for d in diag):
        raise BasisError(f"homology quotient has torsion (diagonal {diag})")
    r0 = len(diag)
    return [vinv[i][:] for i in range(r0, m)]


# ---------------------------------------------------------------------------
# the glued complex
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Complex:
    edges: tuple[tuple[tuple[int, int], tuple[int, int]], ...]  # (rep side, other)
    side_to_edge: dict[tuple[int, int], tuple[int, int]]  # side -> (edge id, sign)
    tails: tuple[int, ...]
    heads: tuple[int, ...]
    n_classes: int
    face_sizes: tuple[int, ...]


def _build_complex(s: TranslationSurface) -> _Complex:
    class_of = corner_class_ids(s)
    edges = []
    side_to_edge: dict[tuple[int, int], tuple[int, int]] = {}
    for a, b in s.gluings:
        rep, other = (a, b) if a <= b else (b, a)
        eid = len(edges)
        edges.append((rep, other))
        side_to_edge[rep] = (eid, +1)
        side_to_edge[other] = (eid, -1)
    tails = []
    heads = []
    for rep, _ in edges:
        p, i = rep
        n = len(s.polygons[p])
        tails.append(class_of[(p, i)])
        heads.append(class_of[(p, (i + 1) % n)])
    n_classes = 1 + max(class_of.values())
    return _Complex(
        edges=tuple(edges),
        side_to_edge=side_to_edge,
        tails=tuple(tails),
        heads=tuple(heads),
        n_classes=n_classes,
        face_sizes=tuple(len(p) for p in s.polygons),
    )


def _face_chains(cx: _Complex) -> list[list[int]]:
    """Boundary of each face as a vector over the edges."""
    ne = len(cx.edges)
    out = []
    for p, size in enumerate(cx.face_sizes):
        chain = [0] * ne
        for i in range(size):
            eid, sign = cx.side_to_edge[(p, i)]
            chain[eid] += sign
        out.append(chain)
    return out


def _spanning_tree(cx: _Complex) -> tuple[list[int | None], list[int]]:
    """BFS tree over (classes, edges); returns (parent edge signed id, order).

    ``parent[c]`` is ``(eid, sign)`` packed as ``sign * (eid + 1)`` for the
    edge leading from the parent class towards ``c``; root is class 0.
    """
    parent: list[int | None] = [None] * cx.n_classes
    seen = [False] * cx.n_classes
    seen[0] = True
    frontier = [0]
    order = [0]
    while frontier:
        nxt = []
        for c in frontier:
            for eid in range(len(cx.edges)):
                t, h = cx.tails[eid], cx.heads[eid]
                if t == c and not seen[h]:
                    seen[h] = True
                    parent[h] = eid + 1  # edge traversed tail -> head
                    nxt.append(h)
                    order.append(h)
                elif h == c and not seen[t]:
                    seen[t] = True
                    parent[t] = -(eid + 1)  # traversed head -> tail
                    nxt.append(t)
                    order.append(t)
        frontier = nxt
    if not all(seen):
        raise BasisError("glued complex is not connected")
    return parent, order


def _path_chains(cx: _Complex, parent: list[int | None]) -> list[list[int]]:
    """Chain of the tree path from class 0 to each class (boundary c - 0)."""
    ne = len(cx.edges)
    chains: list[list[int] | None] = [None] * cx.n_classes
    chains[0] = [0] * ne

    def fill(c: int) -> list[int]:
        if chains[c] is not None:
            return chains[c]
        packed = parent[c]
        eid = abs(packed) - 1
        sign = 1 if packed > 0 else -1
        prev = cx.tails[eid] if sign > 0 else cx.heads[eid]
        base = fill(prev)[:]
        base[eid] += sign
        chains[c] = base
        return base

    for c in range(cx.n_classes):
        fill(c)
    return chains  # type: ignore[return-value]


# ---------------------------------------------------------------------------
# intersection numbers via chord crossings
# ---------------------------------------------------------------------------


def _chord_endpoints(cx: _Complex, coc: list[int], face: int, window: float):
    """Boundary endpoints of the dual-curve chords of a cocycle in a face.

    Strand crossing points sit at edge parameters inside
    ``(window, window + 0.2)`` measured along the representative edge
    direction, so the two sides of a gluing see the same physical points.
    A positive cocycle value crosses the edge from its right to its left;
    the polygon owning the representative side lies on the left.
    """
    pts = []  # (boundary position, +1 in / -1 out)
    size = cx.face_sizes[face]
    for i in range(size):
        eid, sign = cx.side_to_edge[(face, i)]
        m = coc[eid]
        if m == 0:
            continue
        nstr = abs(m)
        direction = (1 if m > 0 else -1) * sign
        for j in range(nstr):
            t = window + 0.2 * (j + 1) / (nstr + 1)
            along = t if sign > 0 else 1.0 - t
            pts.append((i + along, direction))
    return pts


def _match_chords(points) -> list[tuple[float, float]]:
    """Pair in/out endpoints in boundary order into directed chords."""
    pts = sorted(points)
    ins = [p for p, d in pts if d > 0]
    outs = [p for p, d in pts if d < 0]
    if len(ins) != len(outs):
        raise BasisError("cocycle flux does not balance inside a face")
    return list(zip(ins, outs))


def _crossing_number(cx: _Complex, alpha: list[int], beta: list[int]) -> int:
    """Signed crossings of the dual curves of two cocycles."""
    total = 0
    for face in range(len(cx.face_sizes)):
        nfc = cx.face_sizes[face]
        a_chords = _match_chords(_chord_endpoints(cx, alpha, face, 0.2))
        b_chords = _match_chords(_chord_endpoints(cx, beta, face, 0.6))

        def between(a: float, x: float, b: float) -> bool:
            return ((x - a) % nfc) < ((b - a) % nfc)

        for a1, a2 in a_chords:
            for b1, b2 in b_chords:
                b1_in = between(a1, b1, a2)
                b2_in = between(a1, b2, a2)
                if b1_in and not b2_in:
                    total += 1
                elif b2_in and not b1_in:
                    total -= 1
    return total


# ---------------------------------------------------------------------------
# the basis
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HomologyBasis:
    """Basis chains over the complex edges, absolute block first."""

    chains: tuple[tuple[int, ...], ...]
    genus: int
    n_classes: int
    edges: tuple[tuple[tuple[int, int], tuple[int, int]], ...]
    tag: str

    @property
    def k(self) -> int:
        return len(self.chains)

    @property
    def absolute_indices(self) -> tuple[int, ...]:
        return tuple(range(2 * self.genus))


def _symplectic_gram_schmidt(
    n: int, form: list[list[int]]
) -> list[list[int]]:
    """Integer change of basis bringing a unimodular skew form to standard
    blocks; returns coordinate vectors a1, b1, a2, b2, ...
    """
    vecs = [[1 if j == i else 0 for j in range(n)] for i in range(n)]

    def omega(x, y):
        acc = 0
        for i, xi in enumerate(x):
            if xi:
                row = form[i]
                acc += xi * sum(row[j] * yj for j, yj in enumerate(y) if yj)
        return acc

    result: list[list[int]] = []
    while vecs:
        m = [[omega(v, w) for w in vecs] for v in vecs]
        if all(all(x == 0 for x in row) for row in m):
            raise BasisError("intersection form is degenerate")
        while True:
            best = None
            for i in range(len(vecs)):
                for j in range(len(vecs)):
                    if m[i][j] != 0 and (
                        best is None or abs(m[i][j]) < abs(m[best[0]][best[1]])
                    ):
                        best = (i, j)
            bi, bj = best
            d = m[bi][bj]
            if abs(d) == 1:
                break
            k = next(
                (k for k in range(len(vecs)) if m[bi][k] % d != 0), None
            )
            if k is None:
                raise BasisError("intersection form is not unimodular")
            q = round(m[bi][k] / d)
            vecs[k] = [x - q * y for x, y in zip(vecs[k], vecs[bj])]
            m = [[omega(v, w) for w in vecs] for v in vecs]
        if m[bi][bj] == -1:
            bi, bj = bj, bi
        a, b = vecs[bi], vecs[bj]
        rest = []
        for k, v in enumerate(vecs):
            if k in (bi, bj):
                continue
            wb = omega(v, b)
            wa = omega(v, a)
            rest.append([x - wb * ai + wa * bi_ for x, ai, bi_ in zip(v, a, b)])
        result.extend([a, b])
        vecs = rest
    return result


@lru_cache(maxsize=128)
def homology_basis(s: TranslationSurface) -> HomologyBasis:
    require_valid(s)
    stratum = stratum_of(s)
    cx = _build_complex(s)
    ne = len(cx.edges)
    faces = _face_chains(cx)
    parent, _ = _spanning_tree(cx)
    paths = _path_chains(cx, parent)

    tree_eids = {abs(p) - 1 for p in parent if p is not None}
    nontree = [e for e in range(ne) if e not in tree_eids]

    # loop chains for non-tree edges
    loops: list[list[int]] = []
    for eid in nontree:
        chain = [0] * ne
        chain[eid] = 1
        chain = [
            c + t - h
            for c, t, h in zip(chain, paths[cx.tails[eid]], paths[cx.heads[eid]])
        ]
        loops.append(chain)

    # faces in loop coordinates, then H1(M; Z) as a torsion-free quotient
    face_coords = [[f[e] for e in nontree] for f in faces]
    quot = _smith_quotient_basis(face_coords, len(nontree))
    cycle_chains = []
    for coords in quot:
        chain = [0] * ne
        for coef, loop in zip(coords, loops):
            if coef:
                chain = [c + coef * l for c, l in zip(chain, loop)]
        cycle_chains.append(chain)
    if len(cycle_chains) != 2 * stratum.genus:
        raise BasisError(
            f"absolute rank {len(cycle_chains)} != 2g = {2 * stratum.genus}"
        )

    g = stratum.genus
    if g > 0:
        # cocycle representatives of H^1 over Q
        face_rows = [[Fraction(x) for x in f] for f in faces]
        kernel = _kernel_basis(face_rows, ne)
        cob = []
        for c in range(1, cx.n_classes):
            vec = [0] * ne
            for eid in range(ne):
                if cx.heads[eid] == c:
                    vec[eid] += 1
                if cx.tails[eid] == c:
                    vec[eid] -= 1
            cob.append(vec)
        chosen: list[list[int]] = []
        pool = [[Fraction(x) for x in v] for v in cob]
        rank = _rank(pool)
        for vec in kernel:
            trial = pool + [[Fraction(x) for x in vec]]
            r = _rank(trial)
            if r > rank:
                rank = r
                pool = trial
                chosen.append(vec)
        if len(chosen) != 2 * g:
            raise BasisError(f"cohomology rank {len(chosen)} != 2g = {2 * g}")

        # pairing and crossing matrices, then the intersection form
        pair = [
            [sum(a * c for a, c in zip(coc, cyc)) for cyc in cycle_chains]
            for coc in chosen
        ]
        cross = [
            [_crossing_number(cx, chosen[i], chosen[j]) for j in range(2 * g)]
            for i in range(2 * g)
        ]
        pf = [[Fraction(x) for x in row] for row in pair]
        cf = [[Fraction(x) for x in row] for row in cross]
        cinv = _invert(cf)
        inter = _matmul(_matmul(_transpose(pf), cinv), pf)
        inter = [[-x for x in row] for row in inter]
        form = []
        for row in inter:
            introw = []
            for x in row:
                if x.denominator != 1:
                    raise BasisError("intersection form is not integral")
                introw.append(int(x))
            form.append(introw)
        for i in range(2 * g):
            if form[i][i] != 0:
                raise BasisError("intersection form is not alternating")
            for j in range(2 * g):
                if form[i][j] != -form[j][i]:
                    raise BasisError("intersection form is not skew")

        coords = _symplectic_gram_schmidt(2 * g, form)
        absolute = []
        for cv in coords:
            chain = [0] * ne
            for coef, cyc in zip(cv, cycle_chains):
                if coef:
                    chain = [c + coef * y for c, y in zip(chain, cyc)]
            absolute.append(chain)
    else:
        absolute = []

    arcs = [paths[c] for c in range(1, cx.n_classes)]
    chains = [tuple(c) for c in absolute] + [tuple(a) for a in arcs]

    if len(chains) != 2 * g + cx.n_classes - 1:
        raise BasisError("basis has wrong size")
    full = [[Fraction(x) for x in c] for c in chains]
    full += [[Fraction(x) for x in f] for f in faces]
    if _rank(full) != ne:
        raise BasisError("basis chains are linearly dependent")

    h = hashlib.sha1()
    h.update(repr(cx.face_sizes).encode())
    h.update(repr(sorted(s.gluings)).encode())
    h.update(repr(chains).encode())
    tag = h.hexdigest()[:12]

    return HomologyBasis(
        chains=tuple(chains),
        genus=g,
        n_classes=cx.n_classes,
        edges=cx.edges,
        tag=tag,
    )


def _transpose(m):
    return [list(row) for row in zip(*m)]


def _matmul(a, b):
    bt = _transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def _invert(m):
    n = len(m)
    aug = [list(row) + [Fraction(1 if j == i else 0) for j in range(n)] for i, row in enumerate(m)]
    red, pivots = _rref(aug)
    if pivots[:n] != list(range(n)):
        raise BasisError("matrix not invertible")
    return [row[n:] for row in red[:n]]


def periods(s: TranslationSurface) -> PeriodMatrix:
    """Period matrix of the surface over its deterministic basis."""
    basis = homology_basis(s)
    stratum = stratum_of(s)
    row_x = []
    row_y = []
    for chain in basis.chains:
        px = 0.0
        py = 0.0
        for coef, (rep, _) in zip(chain, basis.edges):
            if coef:
                vx, vy = s.edge_vector(*rep)
                px += coef * vx
                py += coef * vy
        row_x.append(px)
        row_y.append(py)
    return PeriodMatrix(
        entries=(tuple(row_x), tuple(row_y)),
        basis_tag=basis.tag,
        genus=stratum.genus,
        zero_count=stratum.zero_count,
    )
