"""Characteristic sections and the flip-sequence / tetrahedralization bridge.

The characteristic section of a triangulation is the piecewise-linear
surface interpolating the heights over its triangles.  A monotone flip
sequence sweeps the section across a volume, one tetrahedron per flip;
this module builds that tetrahedralization, validates it, runs the
reverse (tetrahedra-driven) flipping algorithm, and decides in-front /
behind depth order and acyclicity under parallel projections.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import List, NamedTuple, Optional, Tuple

from .errors import (
    DegenerateDirection,
    FlipforgeError,
    NotApplicable,
    NotMonotone,
    ProjectionCollision,
    NonTriangulatedSilhouette,
)
from .flips import FLIP13, FLIP22, FLIP31, Flip, FlipSequence, apply_flip, flip_direction
from .geometry import (
    ccw_polygon,
    convex_hull_cycle,
    convex_intersection,
    cross2,
    det3,
    interpolate_on_segment,
    orient2d,
    plane_height,
    point_in_triangle,
    polygon_area2,
    segment_crossing_point,
    sub3,
)
from .pointset import LiftedPointSet
from .triangulation import (
    DOWN,
    LOWER,
    UP,
    UPPER,
    Triangulation,
    ValidationReport,
    find_containing_triangle,
)

COMPLETED = "completed"
STUCK = "stuck"


def _norm_tet(t) -> tuple:
    if len(set(t)) != 4:
        raise ValueError(f"tetrahedron with repeated labels: {t}")
    return tuple(sorted(t))


def tet_faces(t) -> list:
    a, b, c, d = t
    return [tuple(sorted(f)) for f in ((a, b, c), (a, b, d), (a, c, d), (b, c, d))]


class Tetrahedralization:
    """Lifted tetrahedra between two boundary sections."""

    __slots__ = ("tets", "lower_boundary", "upper_boundary", "__dict__")

    def __init__(self, tets, lower_boundary: Triangulation, upper_boundary: Triangulation):
        norm = sorted({_norm_tet(t) for t in tets})
        self.tets = tuple(norm)
        self.lower_boundary = lower_boundary
        self.upper_boundary = upper_boundary

    @cached_property
    def tet_set(self) -> frozenset:
        return frozenset(self.tets)

    def __eq__(self, other):
        if not isinstance(other, Tetrahedralization):
            return NotImplemented
        return self.tet_set == other.tet_set

    def __hash__(self):
        return hash(self.tet_set)

    def __repr__(self):
        return f"Tetrahedralization({len(self.tets)} tets)"


def tet_volume6(a: LiftedPointSet, t) -> Fraction:
    """Six times the signed volume of a lifted tetrahedron."""
    p0, p1, p2, p3 = (a.lifted(v) for v in t)
    return det3(sub3(p1, p0), sub3(p2, p0), sub3(p3, p0))


def _oriented_boundary_volume6(a: LiftedPointSet, lower: Triangulation, upper: Triangulation) -> Fraction:
    """Six times the volume enclosed between two boundary sections.

    Divergence formula over the closed surface: upper triangles oriented
    counterclockwise in the plane (outward normal up), lower triangles
    clockwise (outward normal down).
    """
    total = Fraction(0)
    for tri in upper.triangles:
        p = [a.point(v) for v in tri]
        order = tri if orient2d(*p) > 0 else (tri[0], tri[2], tri[1])
        total += det3(*(a.lifted(v) for v in order))
    for tri in lower.triangles:
        p = [a.point(v) for v in tri]
        order = tri if orient2d(*p) < 0 else (tri[0], tri[2], tri[1])
        total += det3(*(a.lifted(v) for v in order))
    return total


def section_height(t: Triangulation, a: LiftedPointSet, q) -> Fraction:
    """Value of the characteristic section of t at planar point q."""
    tri, _ = find_containing_triangle(t, a, q)
    return plane_height(a.lifted(tri[0]), a.lifted(tri[1]), a.lifted(tri[2]), q)


def section_leq(t1: Triangulation, t2: Triangulation, a: LiftedPointSet) -> bool:
    """True iff the section of t1 lies nowhere above the section of t2.

    Piecewise-linear sections over the same domain differ in sign only
    past overlay vertices, so it suffices to compare at every vertex of
    both triangulations and at every proper crossing of a t1 edge with a
    t2 edge.
    """
    for v in sorted(t1.vertices | t2.vertices):
        q = a.point(v)
        if section_height(t1, a, q) > section_height(t2, a, q):
            return False
    for e1 in t1.edges:
        for e2 in t2.edges:
            q = segment_crossing_point(
                a.point(e1[0]), a.point(e1[1]), a.point(e2[0]), a.point(e2[1])
            )
            if q is None:
                continue
            h1 = interpolate_on_segment(a.lifted(e1[0]), a.lifted(e1[1]), q)
            h2 = interpolate_on_segment(a.lifted(e2[0]), a.lifted(e2[1]), q)
            if h1 > h2:
                return False
    return True


def sequence_to_tetrahedralization(
    t_u: Triangulation, seq: FlipSequence, a: LiftedPointSet
) -> Tetrahedralization:
    """Glue one lifted tetrahedron per flip of a monotone sequence.

    The boundaries are the vertically lower and higher of the start and
    end triangulations; an empty sequence yields a degenerate slab.
    """
    if not seq.is_monotone:
        raise NotMonotone("flip sequence mixes directions")
    if seq.start_key and seq.start_key != t_u.canonical_key():
        raise NotApplicable("sequence start key does not match the triangulation")
    t = t_u
    tets = []
    for f in seq.flips:
        tets.append(tuple(sorted(f.support)))
        t = apply_flip(t, f, a)
    if not seq.flips:
        return Tetrahedralization((), t_u, t_u)
    if len(set(tets)) != len(tets):
        raise FlipforgeError("monotone sequence repeated a support tetrahedron")
    if seq.direction == UP:
        lower, upper = t_u, t
    else:
        lower, upper = t, t_u
    return Tetrahedralization(tets, lower, upper)


def validate_tetrahedralization(
    x: Tetrahedralization, a: LiftedPointSet, pairwise_limit: int = 80
) -> ValidationReport:
    """Check that lifted tetrahedra tile the slab between the boundaries.

    Face counts: interior triangles shared by exactly 2 tets, boundary
    triangles by exactly 1, and the count-1 triangles must partition the
    symmetric difference of the two boundary sections (shared boundary
    triangles belong to zero tets).  The total tet volume must equal the
    volume enclosed by the boundary surface, and for small inputs all
    tet pairs are checked interior-disjoint.
    """
    bad: List[tuple] = []
    for t in x.tets:
        for v in t:
            if not (0 <= v < a.n):
                bad.append(("unknown_label", t, v))
    if bad:
        return ValidationReport(tuple(bad))

    for t in x.tets:
        if tet_volume6(a, t) == 0:
            bad.append(("degenerate_tet", t))

    lower_tris = set(x.lower_boundary.triangles)
    upper_tris = set(x.upper_boundary.triangles)
    shared = lower_tris & upper_tris
    boundary_once = (lower_tris | upper_tris) - shared

    counts: dict = {}
    for t in x.tets:
        for f in tet_faces(t):
            counts[f] = counts.get(f, 0) + 1
    for f, c in sorted(counts.items()):
        expected = 1 if f in boundary_once else (0 if f in shared else 2)
        if c != expected:
            bad.append(("face_count", f, c, expected))
    for f in sorted(boundary_once):
        if f not in counts:
            bad.append(("face_count", f, 0, 1))

    tet_total = sum(abs(tet_volume6(a, t)) for t in x.tets)
    slab_total = abs(_oriented_boundary_volume6(a, x.lower_boundary, x.upper_boundary))
    if tet_total != slab_total:
        bad.append(("volume_mismatch", tet_total, slab_total))

    if len(x.tets) <= pairwise_limit:
        pts = {t: [a.lifted(v) for v in t] for t in x.tets}
        for t1, t2 in combinations(x.tets, 2):
            if not tets_interior_disjoint(pts[t1], pts[t2]):
                bad.append(("tet_overlap", t1, t2))

    return ValidationReport(tuple(bad))


# ---------------------------------------------------------------------------
# exact 3d helpers


def cross3(u, v):
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


def dot3(u, v):
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def tets_interior_disjoint(pts1, pts2) -> bool:
    """Exact separating-axis test for two tetrahedra (touching allowed)."""
    axes = []
    for pts in (pts1, pts2):
        for f in combinations(range(4), 3):
            p, q, r = (pts[i] for i in f)
            axes.append(cross3(sub3(q, p), sub3(r, p)))
    edges1 = [sub3(pts1[j], pts1[i]) for i, j in combinations(range(4), 2)]
    edges2 = [sub3(pts2[j], pts2[i]) for i, j in combinations(range(4), 2)]
    for e1 in edges1:
        for e2 in edges2:
            axes.append(cross3(e1, e2))
    for axis in axes:
        if axis == (0, 0, 0):
            continue
        d1 = [dot3(axis, p) for p in pts1]
        d2 = [dot3(axis, p) for p in pts2]
        if max(d1) <= min(d2) or max(d2) <= min(d1):
            return True
    return False


@dataclass(frozen=True)
class Direction3:
    """An unnormalized rational projection direction; depth is dot(p, d)."""

    d: tuple

    def __post_init__(self):
        d = tuple(Fraction(v) for v in self.d)
        if d == (0, 0, 0):
            raise DegenerateDirection("zero direction")
        object.__setattr__(self, "d", d)

    def plane_basis(self) -> tuple:
        """Two rational vectors spanning the projection plane."""
        ez = (Fraction(0), Fraction(0), Fraction(1))
        u = cross3(self.d, ez)
        if u == (0, 0, 0):
            u = (Fraction(1), Fraction(0), Fraction(0))
        v = cross3(self.d, u)
        return u, v


def _project_tet(a: LiftedPointSet, t, u, v) -> list:
    pts = [(dot3(u, a.lifted(x)), dot3(v, a.lifted(x))) for x in t]
    hull = convex_hull_cycle(pts)
    return [pts[i] for i in hull]


def _line_through(u, v, d, q):
    """A 3d point whose (u, v) projection is q, solved exactly by Cramer."""
    m = (u, v, d)
    rhs = (q[0], q[1], Fraction(0))
    det = det3(*m)
    if det == 0:
        raise DegenerateDirection("projection basis is singular")
    cols = []
    for i in range(3):
        mm = [list(row) for row in m]
        for r in range(3):
            mm[r][i] = rhs[r]
        cols.append(Fraction(det3(*mm), det))
    return tuple(cols)


def _depth_interval(pts, p0, d) -> Optional[Tuple[Fraction, Fraction]]:
    """The s-interval where p0 + s*d lies inside a tetrahedron."""
    lo, hi = None, None
    for f in combinations(range(4), 3):
        fp = [pts[i] for i in f]
        opp = pts[[i for i in range(4) if i not in f][0]]
        normal_side = det3(sub3(fp[1], fp[0]), sub3(fp[2], fp[0]), sub3(opp, fp[0]))
        if normal_side == 0:
            return None
        base = det3(sub3(fp[1], fp[0]), sub3(fp[2], fp[0]), sub3(p0, fp[0]))
        slope = det3(sub3(fp[1], fp[0]), sub3(fp[2], fp[0]), d)
        # want sign(base + s * slope) same as sign(normal_side)
        if normal_side < 0:
            base, slope = -base, -slope
        if slope == 0:
            if base < 0:
                return None
            continue
        bound = Fraction(-base, slope)
        if slope > 0:
            lo = bound if lo is None or bound > lo else lo
        else:
            hi = bound if hi is None or bound < hi else hi
    if lo is None or hi is None or lo >= hi:
        return None
    return lo, hi


T1_BEFORE_T2 = "t1_before_t2"
T2_BEFORE_T1 = "t2_before_t1"


def infront_behind(t1, t2, a: LiftedPointSet, direction: Direction3) -> Optional[str]:
    """Depth order of two interior-disjoint tetrahedra along a direction.

    Returns None when the parallel projections share no interior; the
    front body is the one nearer the viewpoint at depth minus infinity.
    """
    u, v = direction.plane_basis()
    poly1 = _project_tet(a, t1, u, v)
    poly2 = _project_tet(a, t2, u, v)
    if len(poly1) < 3 or polygon_area2(poly1) == 0:
        raise DegenerateDirection(f"tet {t1} projects to zero area")
    if len(poly2) < 3 or polygon_area2(poly2) == 0:
        raise DegenerateDirection(f"tet {t2} projects to zero area")
    inter = convex_intersection(ccw_polygon(poly1), ccw_polygon(poly2))
    if len(inter) < 3 or polygon_area2(inter) == 0:
        return None
    k = len(inter)
    q = (sum(p[0] for p in inter) / k, sum(p[1] for p in inter) / k)
    p0 = _line_through(u, v, direction.d, q)
    i1 = _depth_interval([a.lifted(x) for x in t1], p0, direction.d)
    i2 = _depth_interval([a.lifted(x) for x in t2], p0, direction.d)
    if i1 is None or i2 is None:
        raise FlipforgeError("interior overlap sample missed a tetrahedron")
    if i1[1] <= i2[0]:
        return T1_BEFORE_T2
    if i2[1] <= i1[0]:
        return T2_BEFORE_T1
    raise FlipforgeError("tetrahedra overlap along the sampled ray; inputs not disjoint")


class AcyclicityResult(NamedTuple):
    acyclic: bool
    cycle: Optional[tuple]


def acyclicity_check(x: Tetrahedralization, a: LiftedPointSet, direction: Direction3) -> AcyclicityResult:
    """Search the in-front digraph of all tet pairs for a shortest cycle."""
    tets = x.tets
    n = len(tets)
    succ: dict = {i: [] for i in range(n)}
    for i, j in combinations(range(n), 2):
        order = infront_behind(tets[i], tets[j], a, direction)
        if order == T1_BEFORE_T2:
            succ[i].append(j)
        elif order == T2_BEFORE_T1:
            succ[j].append(i)
    best: Optional[tuple] = None
    for s in range(n):
        # BFS over arcs, tracking parents, until an arc closes back to s
        parent = {s: None}
        frontier = [s]
        while frontier and (best is None or len(parent) < len(best)):
            nxt = []
            for node in frontier:
                for m in succ[node]:
                    if m == s:
                        path = [node]
                        while parent[path[-1]] is not None:
                            path.append(parent[path[-1]])
                        cyc = tuple(reversed(path))
                        if best is None or len(cyc) < len(best):
                            best = cyc
                        nxt = []
                        frontier = []
                        break
                    if m not in parent:
                        parent[m] = node
                        nxt.append(m)
                else:
                    continue
                break
            frontier = nxt
        if best is not None and len(best) == 3:
            break
    if best is None:
        return AcyclicityResult(True, None)
    k = best.index(min(best))
    best = best[k:] + best[:k]
    return AcyclicityResult(False, tuple(tets[i] for i in best))


def removable_flip(tet, t: Triangulation, a: LiftedPointSet) -> Optional[Flip]:
    """The directed flip induced by a tetrahedron whose faces are exposed.

    A face is exposed when its projected triangle is present in the
    working triangulation.  One exposed face with the apex projecting
    strictly inside it gives a 1-3 flip; two exposed faces over a convex
    support give a 2-2 flip; three exposed faces around a degree-3
    vertex give a 3-1 flip.  Everything else is not removable.
    """
    faces = tet_faces(tet)
    exposed = [f for f in faces if t.has_triangle(f)]
    if len(exposed) == 1:
        f = exposed[0]
        d = next(v for v in tet if v not in f)
        if d in t.vertices:
            return None
        loc = point_in_triangle(a.point(d), a.point(f[0]), a.point(f[1]), a.point(f[2]))
        if loc.kind != "inside":
            return None
        from .flips import make_flip13

        return make_flip13(f, d, flip_direction(a, FLIP13, (*f, d)))
    if len(exposed) == 2:
        shared = set(exposed[0]) & set(exposed[1])
        if len(shared) != 2:
            return None
        u, v = sorted(shared)
        c = next(x for x in exposed[0] if x not in shared)
        d = next(x for x in exposed[1] if x not in shared)
        if (
            orient2d(a.point(c), a.point(d), a.point(u))
            * orient2d(a.point(c), a.point(d), a.point(v))
            >= 0
        ):
            return None
        from .flips import make_flip22

        support = (u, v, *sorted((c, d)))
        return make_flip22((u, v), (c, d), flip_direction(a, FLIP22, support))
    if len(exposed) == 3:
        common = set(tet)
        for f in exposed:
            common &= set(f)
        if len(common) != 1:
            return None
        d = common.pop()
        link = tuple(sorted(v for v in tet if v != d))
        if t.vertex_degree.get(d, 0) != 3:
            return None
        loc = point_in_triangle(
            a.point(d), a.point(link[0]), a.point(link[1]), a.point(link[2])
        )
        if loc.kind != "inside":
            return None
        from .flips import make_flip31

        return make_flip31(link, d, flip_direction(a, FLIP31, (*link, d)))
    return None


class SequenceExtraction(NamedTuple):
    sequence: FlipSequence
    status: str
    remaining: tuple


def tetrahedralization_to_sequence(
    x: Tetrahedralization, a: LiftedPointSet, start_side: str
) -> SequenceExtraction:
    """Greedily consume removable tetrahedra into a monotone flip run.

    Scans the remaining tetrahedra in label order each round; stops with
    status "stuck" and the unremovable remainder when no tetrahedron is
    removable, or "completed" when the working triangulation reaches the
    far boundary.
    """
    if start_side not in (LOWER, UPPER):
        raise ValueError(f"bad start side {start_side!r}")
    t = x.lower_boundary if start_side == LOWER else x.upper_boundary
    goal = x.upper_boundary if start_side == LOWER else x.lower_boundary
    want = UP if start_side == LOWER else DOWN
    start_key = t.canonical_key()
    remaining = set(x.tets)
    flips: List[Flip] = []
    progress = True
    while remaining and progress:
        progress = False
        for tet in sorted(remaining):
            flip = removable_flip(tet, t, a)
            if flip is None or flip.direction != want:
                continue
            t = apply_flip(t, flip, a)
            remaining.discard(tet)
            flips.append(flip)
            progress = True
            break
    seq = FlipSequence(start_key, tuple(flips))
    if remaining:
        return SequenceExtraction(seq, STUCK, tuple(sorted(remaining)))
    if t != goal:
        raise FlipforgeError("consumed every tetrahedron without reaching the far boundary")
    return SequenceExtraction(seq, COMPLETED, ())


def split_boundary_faces(tets, a: LiftedPointSet, direction: Direction3) -> Tuple[list, list]:
    """Partition the boundary faces of a tet collection by visibility.

    A boundary face (used by exactly one tetrahedron) is a front face
    when its outward normal points against the direction (visible from
    the viewpoint at depth minus infinity), otherwise a back face.
    """
    counts: dict = {}
    owner: dict = {}
    for t in tets:
        for f in tet_faces(t):
            counts[f] = counts.get(f, 0) + 1
            owner[f] = t
    front, back = [], []
    for f in sorted(counts):
        if counts[f] != 1:
            continue
        tet = owner[f]
        opp = next(w for w in tet if w not in f)
        p0, p1, p2 = (a.lifted(w) for w in f)
        normal = cross3(sub3(p1, p0), sub3(p2, p0))
        inward = dot3(normal, sub3(a.lifted(opp), p0))
        outward_d = dot3(normal, direction.d) * (-1 if inward > 0 else 1)
        if outward_d == 0:
            raise NonTriangulatedSilhouette(f"boundary face {f} is parallel to the direction")
        (front if outward_d < 0 else back).append(f)
    return front, back


def reproject_along_direction(
    x: Tetrahedralization, a: LiftedPointSet, direction: Direction3
) -> Tuple[LiftedPointSet, Triangulation, Triangulation]:
    """Re-express a tetrahedralization over the plane orthogonal to d.

    New planar coordinates are the (u, v) dot products against a fixed
    rational basis of the projection plane; the new height of a vertex
    is its depth dot(p, d).  Returns the reprojected point set together
    with the front and back boundary triangulations (front faces the
    viewpoint at depth minus infinity, so it is the lower section of the
    new lift).
    """
    u, v = direction.plane_basis()
    new_pts = []
    new_hts = []
    for label in a.labels:
        p = a.lifted(label)
        new_pts.append((dot3(u, p), dot3(v, p)))
        new_hts.append(dot3(direction.d, p))
    if len(set(new_pts)) != len(new_pts):
        raise ProjectionCollision("two lifted vertices project to one planar point")
    try:
        a_d = LiftedPointSet(new_pts, new_hts, check=True)
    except Exception as exc:
        raise ProjectionCollision(f"projected point set is degenerate: {exc}") from exc

    if not x.tets:
        return a_d, x.lower_boundary, x.upper_boundary

    counts: dict = {}
    owner: dict = {}
    for t in x.tets:
        for f in tet_faces(t):
            counts[f] = counts.get(f, 0) + 1
            owner[f] = t
    front_faces = []
    back_faces = []
    for f, c in counts.items():
        if c != 1:
            continue
        tet = owner[f]
        opp = next(w for w in tet if w not in f)
        p0, p1, p2 = (a.lifted(w) for w in f)
        normal = cross3(sub3(p1, p0), sub3(p2, p0))
        inward = dot3(normal, sub3(a.lifted(opp), p0))
        outward_d = dot3(normal, direction.d) * (-1 if inward > 0 else 1)
        if outward_d == 0:
            raise NonTriangulatedSilhouette(f"boundary face {f} is parallel to the direction")
        if outward_d < 0:
            front_faces.append(f)
        else:
            back_faces.append(f)
    front = Triangulation(front_faces)
    back = Triangulation(back_faces)
    from .triangulation import validate_triangulation

    for name, tri in (("front", front), ("back", back)):
        rep = validate_triangulation(tri, a_d)
        if not rep.ok:
            raise NonTriangulatedSilhouette(
                f"{name} silhouette is not a triangulation: {rep.violations[:3]}"
            )
    return a_d, front, back


def search_acyclic_direction(
    x: Tetrahedralization, a: LiftedPointSet, seed: int = 0, attempts: int = 64
) -> Optional[Direction3]:
    """Randomized hunt for a projection direction with no depth cycle.

    Utility only: nothing guarantees such a direction exists, and a None
    result proves nothing.
    """
    rng = random.Random(seed)
    for _ in range(attempts):
        d = Direction3(
            (
                Fraction(rng.randint(-9, 9)),
                Fraction(rng.randint(-9, 9)),
                Fraction(rng.randint(1, 9)),
            )
        )
        try:
            if acyclicity_check(x, a, d).acyclic:
                return d
        except (DegenerateDirection, FlipforgeError):
            continue
    return None
