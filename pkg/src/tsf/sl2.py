"""The SL(2,R) layer: generators, KAK coordinates, action on surfaces.

Conventions: ``a_t = diag(e^t, e^-t)``, ``r_theta`` the usual rotation,
``u_s`` upper unipotent.  Matrices act on column vectors, hence on surfaces
by mapping every polygon vertex.

The torus case carries an exact integer change-of-basis layer: Gauss
reduction of the period lattice returns the fundamental-domain
representative together with the GL(2,Z) bookkeeping matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ValidationError
from .surface import TranslationSurface, periods

DET_TOL = 1e-12


@dataclass(frozen=True)
class GroupElement:
    """Real 2x2 matrix of determinant 1."""

    a11: float
    a12: float
    a21: float
    a22: float

    def __post_init__(self):
        det = self.a11 * self.a22 - self.a12 * self.a21
        if abs(det - 1.0) > 1e-9:
            raise ValidationError(f"determinant {det} is not 1")

    @property
    def det(self) -> float:
        return self.a11 * self.a22 - self.a12 * self.a21

    def rows(self) -> tuple[tuple[float, float], tuple[float, float]]:
        return ((self.a11, self.a12), (self.a21, self.a22))

    def inv(self) -> "GroupElement":
        return GroupElement(self.a22, -self.a12, -self.a21, self.a11)

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(
            self.a11 * other.a11 + self.a12 * other.a21,
            self.a11 * other.a12 + self.a12 * other.a22,
            self.a21 * other.a11 + self.a22 * other.a21,
            self.a21 * other.a12 + self.a22 * other.a22,
        )

    def apply(self, v: tuple[float, float]) -> tuple[float, float]:
        x, y = v
        return (self.a11 * x + self.a12 * y, self.a21 * x + self.a22 * y)


IDENTITY = GroupElement(1.0, 0.0, 0.0, 1.0)


@dataclass(frozen=True)
class CocycleRecord:
    """Integer bookkeeping of a return to the fundamental domain.

    ``matrix`` is the integer change of basis (new periods = old periods @
    matrix); determinant is +-1.  Records compose by matrix product along a
    path of moves.
    """

    matrix: tuple[tuple[int, int], tuple[int, int]]
    source_tag: str
    target_tag: str

    def __post_init__(self):
        (a, b), (c, d) = self.matrix
        if abs(a * d - b * c) != 1:
            raise ValidationError("cocycle matrix is not unimodular")

    def compose(self, later: "CocycleRecord") -> "CocycleRecord":
        (a, b), (c, d) = self.matrix
        (e, f), (g, h) = later.matrix
        prod = (
            (a * e + b * g, a * f + b * h),
            (c * e + d * g, c * f + d * h),
        )
        return CocycleRecord(prod, self.source_tag, later.target_tag)


def generator(kind: str, param: float) -> GroupElement:
    """Generators: A -> diag(e^t, e^-t), R -> rotation, U -> upper shear."""
    if kind == "A":
        return GroupElement(math.exp(param), 0.0, 0.0, math.exp(-param))
    if kind == "R":
        c, s = math.cos(param), math.sin(param)
        return GroupElement(c, -s, s, c)
    if kind == "U":
        return GroupElement(1.0, param, 0.0, 1.0)
    raise ValueError(f"unknown generator kind {kind!r}")


def kak(g: GroupElement) -> tuple[float, float, float]:
    """Cartan coordinates (theta1, t, theta2) with g = r_theta1 a_t r_theta2.

    ``t >= 0`` is the radial part (log of the top singular value).  At t=0
    the decomposition is a pure rotation and all of it is folded into
    theta1.  For t > 0 the +-pi gauge is fixed by theta1 in [0, pi).
    """
    a, b, c, d = g.a11, g.a12, g.a21, g.a22
    # g g^T = r_theta1 a_{2t} r_{-theta1}
    m11 = a * a + b * b
    m22 = c * c + d * d
    m12 = a * c + b * d
    tr = m11 + m22
    # eigenvalues e^{2t}, e^{-2t}; tr = 2 cosh(2t)
    ch = max(tr / 2.0, 1.0)
    t = 0.5 * math.log(ch + math.sqrt(max(ch * ch - 1.0, 0.0)))
    if t < 1e-12:
        theta1 = math.atan2(c, a) % (2.0 * math.pi)
        return (theta1, 0.0, 0.0)
    theta1 = 0.5 * math.atan2(2.0 * m12, m11 - m22)
    theta1 %= math.pi
    # r_{-theta1} g = a_t r_theta2; the first row is e^t (cos, -sin) theta2,
    # which stays well conditioned for large t.
    c1, s1 = math.cos(theta1), math.sin(theta1)
    r11 = c1 * a + s1 * c
    r12 = c1 * b + s1 * d
    theta2 = math.atan2(-r12, r11) % (2.0 * math.pi)
    return (theta1, t, theta2)


def act(g: GroupElement, s: TranslationSurface) -> TranslationSurface:
    """Linear action on a surface: every vertex v -> g v, gluings kept."""
    polys = tuple(tuple(g.apply(v) for v in poly) for poly in s.polygons)
    return TranslationSurface(polys, s.gluings, s.label)


# ---------------------------------------------------------------------------
# torus reduction
# ---------------------------------------------------------------------------


def gauss_reduce(v1, v2):
    """Lagrange/Gauss reduction of a rank-2 lattice basis.

    Returns ``(w1, w2, U)`` with ``[w1 w2] = [v1 v2] @ U``, ``U`` integer of
    determinant +-1, ``|w1| <= |w2|`` and ``0 <= w1.w2 <= |w1|^2 / 2``.
    """

    def norm2(v):
        return v[0] * v[0] + v[1] * v[1]

    u = [[1, 0], [0, 1]]
    w1, w2 = list(v1), list(v2)

    def col_op(j, q, i):  # col_j -= q col_i
        w = (w1, w2)
        w[j][0] -= q * w[i][0]
        w[j][1] -= q * w[i][1]
        u[0][j] -= q * u[0][i]
        u[1][j] -= q * u[1][i]

    def swap():
        nonlocal w1, w2
        w1, w2 = w2, w1
        u[0][0], u[0][1] = u[0][1], u[0][0]
        u[1][0], u[1][1] = u[1][1], u[1][0]

    for _ in range(10000):
        if norm2(w1) > norm2(w2):
            swap()
        n1 = norm2(w1)
        if n1 == 0:
            raise ValidationError("degenerate lattice")
        q = round((w1[0] * w2[0] + w1[1] * w2[1]) / n1)
        if q == 0:
            break
        col_op(1, q, 0)
    else:
        raise ValidationError("Gauss reduction did not terminate")

    if w1[0] * w2[0] + w1[1] * w2[1] < 0:
        w2 = [-w2[0], -w2[1]]
        u[0][1] = -u[0][1]
        u[1][1] = -u[1][1]
    return (tuple(w1), tuple(w2), ((u[0][0], u[0][1]), (u[1][0], u[1][1])))


def torus_reduce(s: TranslationSurface) -> tuple[TranslationSurface, CocycleRecord]:
    """Fundamental-domain representative of a genus-1 surface.

    The absolute period lattice is Gauss reduced; the returned surface is
    the parallelogram spanned by the reduced basis (opposite sides glued)
    and the record holds the integer basis change.
    """
    pm = periods(s)
    if pm.genus != 1:
        raise ValidationError("torus_reduce requires a genus-1 surface")
    v1 = pm.column(0)
    v2 = pm.column(1)
    det = v1[0] * v2[1] - v1[1] * v2[0]
    if abs(det) < 1e-12:
        raise ValidationError("degenerate lattice")
    w1, w2, u = gauss_reduce(v1, v2)
    surf = parallelogram_torus(w1, w2, label=s.label + "|reduced")
    rec = CocycleRecord(matrix=u, source_tag=pm.basis_tag, target_tag=periods(surf).basis_tag)
    return surf, rec


def parallelogram_torus(
    w1: tuple[float, float], w2: tuple[float, float], label: str = "torus"
) -> TranslationSurface:
    """Torus built from one parallelogram with opposite sides glued."""
    det = w1[0] * w2[1] - w1[1] * w2[0]
    if det < 0:
        w1, w2 = w2, w1
    verts = (
        (0.0, 0.0),
        (w1[0], w1[1]),
        (w1[0] + w2[0], w1[1] + w2[1]),
        (w2[0], w2[1]),
    )
    gluings = (((0, 0), (0, 2)), ((0, 1), (0, 3)))
    return TranslationSurface((verts,), gluings, label)
