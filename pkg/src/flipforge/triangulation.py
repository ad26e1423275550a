"""Planar triangulations of a lifted point set.

A triangulation is a value object: a set of vertex-label triples with a
derived edge-to-triangle incidence map.  Extreme (regular and farthest
point regular) triangulations are computed from the exact 3d convex hull
of the lifted points, which keeps them independent of all flip-based
code paths and usable as an oracle against it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Optional

from .errors import DegenerateLift, EdgeNotInTriangulation, OutsideDomain
from .geometry import (
    NEG,
    POS,
    ZERO,
    Location,
    cross2,
    orient2d,
    orient3d_lifted,
    point_in_triangle,
    triangles_interior_overlap,
)
from .pointset import LiftedPointSet

LOWER = "lower"
UPPER = "upper"

UP = "up"
DOWN = "down"

EDGE_HULL = "hull"
EDGE_LOCALLY_REGULAR = "locally_regular"
EDGE_LOCALLY_NON_REGULAR = "locally_non_regular"

VERTEX_HULL = "hull"
VERTEX_LOWER_INTERIOR = "lower_interior"
VERTEX_UPPER_INTERIOR = "upper_interior"
VERTEX_NEITHER_INTERIOR = "neither_interior"


def _norm_tri(t) -> tuple:
    a, b, c = t
    if len({a, b, c}) != 3:
        raise ValueError(f"triangle with repeated labels: {t}")
    return tuple(sorted((a, b, c)))


class Triangulation:
    """An immutable set of triangles keyed by sorted vertex triples."""

    __slots__ = ("triangles", "__dict__")

    def __init__(self, triangles: Iterable):
        tris = sorted({_norm_tri(t) for t in triangles})
        if not tris:
            raise ValueError("a triangulation needs at least one triangle")
        self.triangles = tuple(tris)

    @cached_property
    def edge_map(self) -> dict:
        m: dict = {}
        for t in self.triangles:
            a, b, c = t
            for e in ((a, b), (a, c), (b, c)):
                m.setdefault(e, []).append(t)
        return {e: tuple(ts) for e, ts in m.items()}

    @cached_property
    def edges(self) -> tuple:
        return tuple(sorted(self.edge_map))

    @cached_property
    def vertices(self) -> frozenset:
        return frozenset(v for t in self.triangles for v in t)

    @cached_property
    def vertex_degree(self) -> dict:
        deg: dict = {}
        for u, v in self.edge_map:
            deg[u] = deg.get(u, 0) + 1
            deg[v] = deg.get(v, 0) + 1
        return deg

    def edge_triangles(self, e) -> tuple:
        key = tuple(sorted(e))
        try:
            return self.edge_map[key]
        except KeyError:
            raise EdgeNotInTriangulation(f"edge {key} not in triangulation") from None

    def has_edge(self, e) -> bool:
        return tuple(sorted(e)) in self.edge_map

    def has_triangle(self, t) -> bool:
        return _norm_tri(t) in self._triangle_set

    @cached_property
    def _triangle_set(self) -> frozenset:
        return frozenset(self.triangles)

    def replace(self, remove, add) -> "Triangulation":
        """A new triangulation with some triangles swapped out."""
        tris = set(self.triangles)
        for t in remove:
            tris.discard(_norm_tri(t))
        for t in add:
            tris.add(_norm_tri(t))
        return Triangulation(tris)

    def canonical_key(self) -> str:
        """Deterministic serialization; equal keys iff equal triangle sets."""
        return ";".join(",".join(str(v) for v in t) for t in self.triangles)

    @classmethod
    def from_canonical_key(cls, key: str) -> "Triangulation":
        tris = [tuple(int(v) for v in part.split(",")) for part in key.split(";")]
        return cls(tris)

    def __eq__(self, other):
        if not isinstance(other, Triangulation):
            return NotImplemented
        return self.triangles == other.triangles

    def __hash__(self):
        return hash(self.triangles)

    def __repr__(self):
        return f"Triangulation({len(self.triangles)} triangles)"


def canonical_key(t: Triangulation) -> str:
    return t.canonical_key()


@dataclass(frozen=True)
class ValidationReport:
    """List of (code, detail) violations; empty means valid."""

    violations: tuple

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> set:
        return {v[0] for v in self.violations}


def validate_triangulation(t: Triangulation, a: LiftedPointSet) -> ValidationReport:
    """Check the simplicial-complex conditions for a planar triangulation.

    Verifies vertex labels, nondegenerate triangles, edge incidence
    counts (interior edges in exactly 2 triangles, hull edges in exactly
    1, every hull edge present), pairwise interior disjointness, and
    that the total area equals the area of the convex hull.
    """
    bad = []
    for tri in t.triangles:
        for v in tri:
            if not (0 <= v < a.n):
                bad.append(("unknown_label", tri, v))
    if bad:
        return ValidationReport(tuple(bad))

    for tri in t.triangles:
        if orient2d(a.point(tri[0]), a.point(tri[1]), a.point(tri[2])) == ZERO:
            bad.append(("degenerate_triangle", tri))
    if bad:
        return ValidationReport(tuple(bad))

    hull_edges = a.hull_edges
    for e, tris in t.edge_map.items():
        count = len(tris)
        if e in hull_edges:
            if count != 1:
                bad.append(("edge_incidence", e, count))
        else:
            if count != 2:
                bad.append(("edge_incidence", e, count))
    for e in hull_edges:
        if e not in t.edge_map:
            bad.append(("missing_hull_edge", e))

    tris_pts = [tuple(a.point(v) for v in tri) for tri in t.triangles]
    for i, j in combinations(range(len(tris_pts)), 2):
        if triangles_interior_overlap(tris_pts[i], tris_pts[j]):
            bad.append(("overlap", t.triangles[i], t.triangles[j]))

    total2 = sum(abs(cross2(*pts)) for pts in tris_pts)
    cyc = a.hull_cycle
    hull2 = Fraction(0)
    for i in range(1, len(cyc) - 1):
        hull2 += cross2(a.point(cyc[0]), a.point(cyc[i]), a.point(cyc[i + 1]))
    if total2 != abs(hull2):
        bad.append(("area_mismatch", total2, abs(hull2)))

    return ValidationReport(tuple(bad))


def extreme_triangulation(a: LiftedPointSet, side: str) -> Triangulation:
    """The regular (side="lower") or farthest-point regular (side="upper")
    triangulation of the lifted set.

    Computed by an exact facet scan of the 3d convex hull of the lifted
    points: a planar triple is a lower (upper) facet iff every other
    lifted point is strictly above (below) its plane.  Independent of all
    flip machinery by design.
    """
    if side not in (LOWER, UPPER):
        raise ValueError(f"side must be '{LOWER}' or '{UPPER}', got {side!r}")
    want = POS if side == LOWER else NEG
    lifted = [a.lifted(i) for i in a.labels]
    facets = []
    for i, j, k in combinations(a.labels, 3):
        if orient2d(lifted[i], lifted[j], lifted[k]) == ZERO:
            continue
        good = True
        ties = False
        for m in a.labels:
            if m in (i, j, k):
                continue
            s = orient3d_lifted(lifted[i], lifted[j], lifted[k], lifted[m])
            if s == -want:
                good = False
                break
            if s == ZERO:
                ties = True
        if good:
            if ties:
                raise DegenerateLift(
                    f"hull facet through {(i, j, k)} has extra coplanar vertices"
                )
            facets.append((i, j, k))
    return Triangulation(facets)


def classify_edge(t: Triangulation, e, a: LiftedPointSet, direction: str) -> str:
    """Classify an edge as hull, locally regular, or locally non-regular.

    An interior edge is locally non-regular with respect to "up" when the
    lifted vertex opposite one incident triangle lies strictly above that
    triangle's lifted plane (and symmetrically below for "down").  The
    answer does not depend on which incident triangle is used.
    """
    tris = t.edge_triangles(e)
    if len(tris) == 1:
        return EDGE_HULL
    (u, v) = tuple(sorted(e))
    c = next(x for x in tris[0] if x not in (u, v))
    d = next(x for x in tris[1] if x not in (u, v))
    s = orient3d_lifted(a.lifted(u), a.lifted(v), a.lifted(c), a.lifted(d))
    want = POS if direction == UP else NEG
    return EDGE_LOCALLY_NON_REGULAR if s == want else EDGE_LOCALLY_REGULAR


@dataclass(frozen=True)
class Flippability:
    """How an interior edge can be flipped.

    kind is "22" (convex support), "31" (reflex support whose third
    triangle is present; ``vertex`` is the removable reflex vertex), or
    "unflippable" (``vertex`` is the support vertex whose star does not
    contain the support).
    """

    kind: str
    vertex: Optional[int] = None


def classify_flippability(t: Triangulation, e, a: LiftedPointSet) -> Flippability:
    """Decide whether an interior edge admits a 2-2 flip, a 3-1 flip, or none."""
    tris = t.edge_triangles(e)
    if len(tris) == 1:
        from .errors import HullEdge

        raise HullEdge(f"edge {tuple(sorted(e))} is on the hull")
    (u, v) = tuple(sorted(e))
    c = next(x for x in tris[0] if x not in (u, v))
    d = next(x for x in tris[1] if x not in (u, v))
    pu, pv, pc, pd = a.point(u), a.point(v), a.point(c), a.point(d)
    side_u = orient2d(pc, pd, pu)
    side_v = orient2d(pc, pd, pv)
    if side_u * side_v < 0:
        return Flippability("22")
    # u and v on the same side of cd: one endpoint is the reflex vertex
    if point_in_triangle(pu, pv, pc, pd).kind == "inside":
        reflex = u
    else:
        reflex = v
    other = v if reflex == u else u
    third = tuple(sorted((reflex, c, d)))
    if t.has_triangle(third):
        return Flippability("31", reflex)
    return Flippability("unflippable", reflex)


def classify_vertices(a: LiftedPointSet) -> dict:
    """Label each vertex by which extreme triangulation keeps it.

    Hull vertices belong to both extremes; an interior vertex is on the
    lower envelope, the upper envelope, or neither (it can never be on
    both, since the two envelopes of the lifted hull meet only above the
    planar hull boundary).
    """
    lower = extreme_triangulation(a, LOWER).vertices
    upper = extreme_triangulation(a, UPPER).vertices
    out = {}
    for label in a.labels:
        if label in a.hull_labels:
            out[label] = VERTEX_HULL
        elif label in lower:
            assert label not in upper, "interior vertex on both envelopes"
            out[label] = VERTEX_LOWER_INTERIOR
        elif label in upper:
            out[label] = VERTEX_UPPER_INTERIOR
        else:
            out[label] = VERTEX_NEITHER_INTERIOR
    return out


def find_containing_triangle(t: Triangulation, a: LiftedPointSet, q):
    """A triangle of the triangulation containing planar point q.

    Returns (triangle, Location).  Raises OutsideDomain when no triangle
    contains q.  On shared edges or vertices any incident triangle may be
    returned; interpolated section values agree there.
    """
    for tri in t.triangles:
        loc = point_in_triangle(q, a.point(tri[0]), a.point(tri[1]), a.point(tri[2]))
        if loc.kind != "outside":
            return tri, loc
    raise OutsideDomain(f"point {q} is outside the triangulated domain")


def heights_are_convex(a: LiftedPointSet) -> bool:
    """True iff every lifted point lies on the lower envelope."""
    return extreme_triangulation(a, LOWER).vertices == frozenset(a.labels)


def heights_are_concave(a: LiftedPointSet) -> bool:
    """True iff every lifted point lies on the upper envelope."""
    return extreme_triangulation(a, UPPER).vertices == frozenset(a.labels)
