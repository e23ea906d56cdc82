"""Square-tiled surfaces as permutation pairs, with their SL(2,Z) moves.

An origami on n squares is a pair of permutations of {1..n}: ``sigma_h``
maps a square to its right neighbour, ``sigma_v`` to its upper neighbour.
The pair must act transitively (connected surface).  Vertex classes of the
expanded surface correspond to cycles of the commutator
``sigma_h sigma_v sigma_h^-1 sigma_v^-1``; a cycle of length l carries cone
angle 2*pi*l.

Generator conventions for the SL(2,Z) moves (fixed once, to make orbits
reproducible):

    T: (h, v) -> (h, v h^-1)        S: (h, v) -> (v^-1, h)

so that S^2 is the elliptic involution (h, v) -> (h^-1, v^-1) up to
relabeling.  Canonical forms relabel squares by BFS (successor order: right
neighbour then upper neighbour) from every start square and keep the
lexicographically least result.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import CapExceeded, ValidationError
from .surface import Stratum, TranslationSurface

Perm = tuple[int, ...]  # one-line notation on {0..n-1}


def _compose(p: Perm, q: Perm) -> Perm:
    """(p*q)(x) = p(q(x))."""
    return tuple(p[q[x]] for x in range(len(p)))


def _inverse(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, v in enumerate(p):
        out[v] = i
    return tuple(out)


def _cycle_type(p: Perm) -> tuple[int, ...]:
    seen = [False] * len(p)
    lens = []
    for i in range(len(p)):
        if seen[i]:
            continue
        l = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = p[j]
            l += 1
        lens.append(l)
    return tuple(sorted(lens, reverse=True))


def cycles_of(p: Perm) -> list[list[int]]:
    seen = [False] * len(p)
    out = []
    for i in range(len(p)):
        if seen[i]:
            continue
        cyc = []
        j = i
        while not seen[j]:
            seen[j] = True
            cyc.append(j)
            j = p[j]
        out.append(cyc)
    return out


@dataclass(frozen=True)
class Origami:
    """Pair of permutations encoding a square-tiled surface."""

    n: int
    sigma_h: Perm
    sigma_v: Perm

    def __post_init__(self):
        if sorted(self.sigma_h) != list(range(self.n)) or sorted(self.sigma_v) != list(
            range(self.n)
        ):
            raise ValidationError("sigma_h / sigma_v are not permutations of {1..n}")
        if not self._transitive():
            raise ValidationError("origami is not connected")

    def _transitive(self) -> bool:
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for y in (self.sigma_h[x], self.sigma_v[x]):
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == self.n

    def commutator(self) -> Perm:
        hi = _inverse(self.sigma_h)
        vi = _inverse(self.sigma_v)
        return _compose(self.sigma_h, _compose(self.sigma_v, _compose(hi, vi)))

    def stratum_from_commutator(self) -> Stratum:
        """Stratum read off the commutator cycle type (no expansion)."""
        lens = _cycle_type(self.commutator())
        alpha = tuple(sorted((l - 1 for l in lens if l > 1), reverse=True))
        total = sum(l - 1 for l in lens)
        if total % 2 != 0:
            raise ValidationError("commutator cycle type is not of genus form")
        genus = total // 2 + 1
        return Stratum(alpha=alpha, genus=genus, zero_count=len(lens))


def expand(o: Origami) -> TranslationSurface:
    """Build the translation surface of unit squares.

    Square i sits at offset (1.5*i, 0); edge order per square is bottom,
    right, top, left.  Right edge of i glues to the left edge of
    sigma_h(i), top of i to the bottom of sigma_v(i).
    """
    polys = []
    for i in range(o.n):
        x0 = 1.5 * i
        polys.append(((x0, 0.0), (x0 + 1.0, 0.0), (x0 + 1.0, 1.0), (x0, 1.0)))
    gluings = []
    for i in range(o.n):
        gluings.append(((i, 1), (o.sigma_h[i], 3)))
        gluings.append(((i, 2), (o.sigma_v[i], 0)))
    return TranslationSurface(tuple(polys), tuple(gluings), f"origami-{o.n}")


def origami_act(gen: str, o: Origami) -> Origami:
    """Apply an SL(2,Z) generator (``"S"`` or ``"T"``)."""
    if gen == "T":
        return Origami(o.n, o.sigma_h, _compose(o.sigma_v, _inverse(o.sigma_h)))
    if gen == "S":
        return Origami(o.n, _inverse(o.sigma_v), o.sigma_h)
    raise ValueError(f"unknown origami generator {gen!r}")


def canonical_form(o: Origami) -> Origami:
    """Least relabeling under simultaneous conjugation.

    For each start square, squares are renamed in BFS discovery order
    (exploring the right neighbour, then the upper neighbour); the
    lexicographically least (sigma_h, sigma_v) pair over all starts wins.
    """
    best: tuple[Perm, Perm] | None = None
    n = o.n
    for start in range(n):
        relabel = [-1] * n
        relabel[start] = 0
        queue = deque([start])
        nxt = 1
        while queue:
            x = queue.popleft()
            for y in (o.sigma_h[x], o.sigma_v[x]):
                if relabel[y] < 0:
                    relabel[y] = nxt
                    nxt += 1
                    queue.append(y)
        new_h = [0] * n
        new_v = [0] * n
        for x in range(n):
            new_h[relabel[x]] = relabel[o.sigma_h[x]]
            new_v[relabel[x]] = relabel[o.sigma_v[x]]
        cand = (tuple(new_h), tuple(new_v))
        if best is None or cand < best:
            best = cand
    return Origami(n, best[0], best[1])


def origami_orbit(o: Origami, cap: int = 10**6) -> set[Origami]:
    """BFS closure under S and T modulo relabeling.

    Raises :class:`CapExceeded` (with the partial orbit attached) when the
    orbit grows beyond ``cap``.
    """
    start = canonical_form(o)
    seen = {start}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        for gen in ("S", "T"):
            nxt = canonical_form(origami_act(gen, cur))
            if nxt not in seen:
                if len(seen) >= cap:
                    raise CapExceeded(
                        f"origami orbit exceeds cap {cap}", partial=seen
                    )
                seen.add(nxt)
                queue.append(nxt)
    return seen
