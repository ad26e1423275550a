"""Exact geometric predicates over rational coordinates.

Every geometric decision in the package reduces to the integer sign of a
small determinant evaluated in ``fractions.Fraction`` arithmetic, so all
predicates are exact, pure, and bit-reproducible.  Planar points are
``(x, y)`` pairs and lifted points are ``(x, y, height)`` triples whose
entries are ``Fraction`` or ``int``.

Sign conventions:

* ``orient2d(a, b, c)``  is +1 when ``a, b, c`` run counterclockwise.
* ``orient3d_lifted(a, b, c, d)`` is +1 when the lifted point ``d`` lies
  vertically above the plane through the lifted points ``a, b, c`` (the
  base triangle is normalized to counterclockwise first, so the answer
  depends only on the set ``{a, b, c}``).
"""

from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

from .errors import DegenerateBase

Rat = Fraction

NEG, ZERO, POS = -1, 0, 1


def sign(x) -> int:
    """Integer sign of a rational number."""
    if x > 0:
        return POS
    if x < 0:
        return NEG
    return ZERO


def cross2(a, b, c):
    """Twice the signed area of triangle a, b, c (unreduced value)."""
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def orient2d(a, b, c) -> int:
    """Orientation of the planar triple: +1 ccw, -1 cw, 0 collinear."""
    return sign(cross2(a, b, c))


def sub3(p, q):
    return (p[0] - q[0], p[1] - q[1], p[2] - q[2])


def det3(r0, r1, r2):
    return (
        r0[0] * (r1[1] * r2[2] - r1[2] * r2[1])
        - r0[1] * (r1[0] * r2[2] - r1[2] * r2[0])
        + r0[2] * (r1[0] * r2[1] - r1[1] * r2[0])
    )


def orient3d(a, b, c, d) -> int:
    """Sign of det(b-a, c-a, d-a) for 3d points.

    +1 when d lies on the side of plane(a, b, c) pointed to by the
    normal (b-a) x (c-a).  Zero means the four points are coplanar.
    """
    return sign(det3(sub3(b, a), sub3(c, a), sub3(d, a)))


def orient3d_lifted(a, b, c, d) -> int:
    """+1 iff lifted point d is vertically above the plane through a, b, c.

    Arguments are (x, y, height) triples.  The base is normalized so the
    planar projection of a, b, c is counterclockwise; raises
    DegenerateBase when that projection is collinear.
    """
    base = orient2d(a, b, c)
    if base == ZERO:
        raise DegenerateBase(f"collinear base triangle {a}, {b}, {c}")
    return orient3d(a, b, c, d) * base


class Location(NamedTuple):
    """Result of a point-in-triangle query.

    ``kind`` is one of "inside", "outside", "edge", "vertex".  For edges
    the index names the edge (0 = ab, 1 = bc, 2 = ca); for vertices it
    names the vertex (0 = a, 1 = b, 2 = c).
    """

    kind: str
    index: Optional[int] = None


def point_in_triangle(p, a, b, c) -> Location:
    """Exact classification of p against triangle a, b, c."""
    o = orient2d(a, b, c)
    if o == ZERO:
        raise DegenerateBase(f"degenerate triangle {a}, {b}, {c}")
    s_ab = orient2d(a, b, p) * o
    s_bc = orient2d(b, c, p) * o
    s_ca = orient2d(c, a, p) * o
    if s_ab < 0 or s_bc < 0 or s_ca < 0:
        return Location("outside")
    zeros = [s_ab == 0, s_bc == 0, s_ca == 0]
    nz = sum(zeros)
    if nz == 0:
        return Location("inside")
    if nz == 1:
        return Location("edge", zeros.index(True))
    # two zero signs: p coincides with the shared vertex of the two edges
    if zeros[0] and zeros[2]:
        return Location("vertex", 0)
    if zeros[0] and zeros[1]:
        return Location("vertex", 1)
    return Location("vertex", 2)


def segments_properly_cross(a, b, c, d) -> bool:
    """True iff the open segments ab and cd share exactly one interior point.

    Endpoint touches, T-junctions, and collinear overlaps all return False.
    """
    if orient2d(a, b, c) * orient2d(a, b, d) != -1:
        return False
    return orient2d(c, d, a) * orient2d(c, d, b) == -1


def segment_crossing_point(a, b, c, d):
    """The unique interior crossing point of two properly crossing segments.

    Returns None when the segments do not properly cross.
    """
    if not segments_properly_cross(a, b, c, d):
        return None
    # walk along cd: the crossing splits cd proportionally to the signed
    # areas of c and d against the line ab
    num = cross2(a, b, c)
    denom = cross2(a, b, c) - cross2(a, b, d)
    t = Fraction(num, denom)
    return (c[0] + t * (d[0] - c[0]), c[1] + t * (d[1] - c[1]))


def interpolate_on_segment(p3a, p3b, q):
    """Height of the lifted segment p3a-p3b above planar point q on it.

    The planar projection of q must lie on the closed planar segment;
    the caller guarantees this (used for values at edge crossings).
    """
    dx = p3b[0] - p3a[0]
    dy = p3b[1] - p3a[1]
    if dx != 0:
        t = Fraction(q[0] - p3a[0], dx)
    else:
        t = Fraction(q[1] - p3a[1], dy)
    return p3a[2] + t * (p3b[2] - p3a[2])


def plane_height(p3a, p3b, p3c, q):
    """Height at planar point q of the plane through three lifted points."""
    area = cross2(p3a, p3b, p3c)
    if area == 0:
        raise DegenerateBase("plane through planar-collinear points is vertical")
    wa = cross2(q, p3b, p3c)
    wb = cross2(p3a, q, p3c)
    wc = cross2(p3a, p3b, q)
    return Fraction(wa * p3a[2] + wb * p3b[2] + wc * p3c[2], area)


# ---------------------------------------------------------------------------
# convex polygon machinery (exact clipping, used for overlap tests)


def polygon_area2(pts) -> Fraction:
    """Twice the signed area of a simple polygon given as a vertex cycle."""
    total = 0
    n = len(pts)
    for i in range(n):
        p, q = pts[i], pts[(i + 1) % n]
        total += p[0] * q[1] - q[0] * p[1]
    return total


def clip_halfplane(poly, a, b):
    """Clip a convex polygon against the closed halfplane left of line a->b."""
    out = []
    n = len(poly)
    if n == 0:
        return out
    vals = [cross2(a, b, p) for p in poly]
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        vp, vq = vals[i], vals[(i + 1) % n]
        if vp >= 0:
            out.append(p)
        if (vp > 0 > vq) or (vp < 0 < vq):
            t = Fraction(vp, vp - vq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    # drop consecutive duplicates introduced by vertices lying on the line
    dedup = []
    for p in out:
        if not dedup or p != dedup[-1]:
            dedup.append(p)
    if len(dedup) > 1 and dedup[0] == dedup[-1]:
        dedup.pop()
    return dedup


def convex_intersection(poly1, poly2):
    """Intersection polygon of two convex polygons (both oriented ccw)."""
    result = list(poly1)
    n = len(poly2)
    for i in range(n):
        if not result:
            break
        result = clip_halfplane(result, poly2[i], poly2[(i + 1) % n])
    return result


def ccw_polygon(pts):
    """Return the vertex cycle reversed if it is clockwise."""
    return list(pts) if polygon_area2(pts) >= 0 else list(reversed(pts))


def triangles_interior_overlap(t1, t2) -> bool:
    """True iff two planar triangles have intersecting interiors."""
    inter = convex_intersection(ccw_polygon(t1), ccw_polygon(t2))
    return len(inter) >= 3 and polygon_area2(inter) != 0


def convex_hull_cycle(points: Sequence) -> list:
    """Indices of the convex hull of distinct planar points, ccw order.

    Uses the monotone chain with exact orientation tests; collinear hull
    points are kept off the hull cycle (strict turns only).
    """
    idx = sorted(range(len(points)), key=lambda i: (points[i][0], points[i][1]))
    if len(idx) <= 2:
        return idx

    def build(seq):
        chain = []
        for i in seq:
            while len(chain) >= 2 and orient2d(points[chain[-2]], points[chain[-1]], points[i]) <= 0:
                chain.pop()
            chain.append(i)
        return chain

    lower = build(idx)
    upper = build(reversed(idx))
    return lower[:-1] + upper[:-1]
