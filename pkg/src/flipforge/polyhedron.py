"""Flip-based triangulation of slab polyhedra between two sections.

The input polyhedron is bounded by the lifted sections of two
triangulations of one point set with convex or concave heights.  The
triangulator walks monotone directed flips from the source section,
admitting a flip only when the swept tetrahedron stays on the source
side of the target section (a conforming flip), so the run can never
overshoot the target.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Set, Tuple

from .errors import FlipforgeError
from .flips import (
    FLIP13,
    FLIP22,
    FLIP31,
    Flip,
    FlipSequence,
    apply_flip,
    enumerate_directed_flips,
    flip_direction,
    make_flip13,
    make_flip22,
    make_flip31,
)
from .geometry import (
    orient2d,
    interpolate_on_segment,
    plane_height,
    point_in_triangle,
    segment_crossing_point,
)
from .lift3d import Tetrahedralization, section_height, section_leq
from .pointset import LiftedPointSet
from .triangulation import (
    DOWN,
    EDGE_LOCALLY_NON_REGULAR,
    UP,
    Triangulation,
    classify_edge,
    classify_flippability,
    find_containing_triangle,
    heights_are_concave,
    heights_are_convex,
    validate_triangulation,
)

SUCCESS = "success"
INDECOMPOSABLE = "indecomposable"
INVALID_INPUT = "invalid_input"


@dataclass(frozen=True)
class PolyhedronInput:
    """A source section, a target section, and the derived flip direction."""

    a: LiftedPointSet
    source: Triangulation
    target: Triangulation

    @property
    def direction(self) -> Optional[str]:
        cached = self.__dict__.get("_direction", "unset")
        if cached == "unset":
            if self.source == self.target:
                cached = UP
            elif section_leq(self.source, self.target, self.a):
                cached = UP
            elif section_leq(self.target, self.source, self.a):
                cached = DOWN
            else:
                cached = None
            object.__setattr__(self, "_direction", cached)
        return cached


@dataclass(frozen=True)
class PolyhedronReport:
    """Hard violations block the run; warnings do not."""

    hard: tuple
    warnings: tuple

    @property
    def ok(self) -> bool:
        return not self.hard


def validate_polyhedron_input(p: PolyhedronInput) -> PolyhedronReport:
    """Check the input family conditions for the slab triangulator.

    Hard failures: invalid boundary triangulations, sections that cross
    (no vertical order), heights neither convex nor concave.  Warnings:
    source containing interior vertices, a non-regular target, a target
    with no entering flip from the source side (the run may then end
    indecomposable, which is a legitimate outcome).
    """
    hard: List[tuple] = []
    warnings: List[tuple] = []
    for name, t in (("source", p.source), ("target", p.target)):
        rep = validate_triangulation(t, p.a)
        if not rep.ok:
            hard.append(("invalid_triangulation", name, rep.violations[:3]))
    if hard:
        return PolyhedronReport(tuple(hard), ())

    if p.direction is None:
        hard.append(("sections_cross", "no vertical order between source and target"))

    convex = heights_are_convex(p.a)
    concave = heights_are_concave(p.a)
    if not convex and not concave:
        hard.append(("heights_not_convex_or_concave",))
    # all lifted points on one envelope puts every vertex on the lifted hull
    if not (convex or concave):
        warnings.append(("vertices_not_in_convex_position",))

    interior_in_source = sorted(set(p.source.vertices) & p.a.interior_labels)
    if interior_in_source:
        warnings.append(("source_has_interior_vertices", tuple(interior_in_source)))

    if p.direction is not None and p.source != p.target:
        from .flip_graph import is_regular

        if not is_regular(p.target, p.a).regular:
            warnings.append(("target_non_regular",))
        entering = enumerate_directed_flips(
            p.target, p.a, DOWN if p.direction == UP else UP
        )
        if not entering:
            warnings.append(("target_has_no_entering_flip",))
    return PolyhedronReport(tuple(hard), tuple(warnings))


def _new_local_triangles(flip: Flip) -> List[tuple]:
    a, b, c, d = flip.support
    if flip.kind == FLIP22:
        return [tuple(sorted((c, d, a))), tuple(sorted((c, d, b)))]
    if flip.kind == FLIP13:
        return [tuple(sorted((a, b, d))), tuple(sorted((b, c, d))), tuple(sorted((a, c, d)))]
    return [tuple(sorted((a, b, c)))]


def _support_region(flip: Flip, a: LiftedPointSet) -> List[int]:
    """The support polygon as a ccw label cycle."""
    va, vb, vc, vd = flip.support
    if flip.kind == FLIP22:
        cycle = [va, vc, vb, vd]
    else:
        cycle = [va, vb, vc]
    pts = [a.point(v) for v in cycle]
    if orient2d(pts[0], pts[1], pts[2]) < 0:
        cycle.reverse()
    return cycle


def is_conforming_flip(flip: Flip, t_current: Triangulation, p: PolyhedronInput) -> bool:
    """True iff the post-flip section still respects the target order.

    Exact local test: the changed region is the flip support, so the new
    section is compared against the target section at the support
    vertices, at every crossing of a new edge with a target edge, and at
    every target vertex inside the support polygon.
    """
    a = p.a
    direction = p.direction
    new_tris = _new_local_triangles(flip)
    region = _support_region(flip, a)
    region_pts = [a.point(v) for v in region]

    def conforms(new_value: Fraction, target_value: Fraction) -> bool:
        return new_value <= target_value if direction == UP else new_value >= target_value

    # support corners carry their own heights; a removed vertex is covered
    # by the interpolated plane of the new triangle instead
    for v in sorted(set(flip.support)):
        q = a.point(v)
        if flip.kind == FLIP31 and v == flip.support[3]:
            la, lb, lc, _ = flip.support
            new_value = plane_height(a.lifted(la), a.lifted(lb), a.lifted(lc), q)
        else:
            new_value = a.height(v)
        if not conforms(new_value, section_height(p.target, a, q)):
            return False

    new_edges = sorted({e for tri in new_tris for e in
                        ((tri[0], tri[1]), (tri[0], tri[2]), (tri[1], tri[2]))})
    for e1 in new_edges:
        for e2 in p.target.edges:
            q = segment_crossing_point(
                a.point(e1[0]), a.point(e1[1]), a.point(e2[0]), a.point(e2[1])
            )
            if q is None:
                continue
            h_new = interpolate_on_segment(a.lifted(e1[0]), a.lifted(e1[1]), q)
            h_tgt = interpolate_on_segment(a.lifted(e2[0]), a.lifted(e2[1]), q)
            if not conforms(h_new, h_tgt):
                return False

    region_set = set(region)
    for v in sorted(p.target.vertices):
        if v in region_set:
            continue
        q = a.point(v)
        inside = True
        k = len(region_pts)
        for i in range(k):
            if orient2d(region_pts[i], region_pts[(i + 1) % k], q) < 0:
                inside = False
                break
        if not inside:
            continue
        h_new = None
        for tri in new_tris:
            loc = point_in_triangle(q, a.point(tri[0]), a.point(tri[1]), a.point(tri[2]))
            if loc.kind != "outside":
                h_new = plane_height(
                    a.lifted(tri[0]), a.lifted(tri[1]), a.lifted(tri[2]), q
                )
                break
        if h_new is None:
            raise FlipforgeError(f"target vertex {v} inside the support was not located")
        if not conforms(h_new, a.height(v)):
            return False
    return True


@dataclass
class TriangulationOutcome:
    """Result of a polyhedron triangulation run."""

    status: str
    tetrahedralization: Optional[Tetrahedralization] = None
    sequence: Optional[FlipSequence] = None
    stuck: Optional[Triangulation] = None
    certificate: Optional[dict] = None
    report: Optional[PolyhedronReport] = None
    stats: Dict[str, int] = field(default_factory=dict)


def _region_edges(flip: Flip) -> Set[tuple]:
    a, b, c, d = flip.support
    if flip.kind == FLIP22:
        pairs = [(a, c), (a, d), (b, c), (b, d), (c, d), (a, b)]
    else:
        pairs = [(a, b), (b, c), (a, c), (a, d), (b, d), (c, d)]
    return {tuple(sorted(e)) for e in pairs}


def triangulate_polyhedron(p: PolyhedronInput) -> TriangulationOutcome:
    """Monotone conforming flips from the source toward the target section.

    Locally non-regular edges are worked in lexicographic order; edges
    already in the target are dropped, flippable ones are applied when
    conforming, and rejected flips are tagged until a later flip touches
    one of their incident triangles.  When the edge worklist drains,
    absent target vertices are inserted by conforming 1-3 flips.  The
    outcome is Success exactly when the target section is reached.
    """
    report = validate_polyhedron_input(p)
    stats = {"flips": 0, "conformity_tests": 0}
    if not report.ok:
        return TriangulationOutcome(INVALID_INPUT, report=report, stats=stats)
    direction = p.direction
    t = p.source
    target_edges = set(p.target.edges)
    tets: List[tuple] = []
    flips: List[Flip] = []
    worklist: Set[tuple] = set(t.edges)
    tags: Set[tuple] = set()

    def lnr_flip_on(e) -> Optional[Flip]:
        if len(t.edge_triangles(e)) == 1:
            return None
        if classify_edge(t, e, p.a, direction) != EDGE_LOCALLY_NON_REGULAR:
            return None
        fl = classify_flippability(t, e, p.a)
        u, v = e
        tris = t.edge_triangles(e)
        c = next(x for x in tris[0] if x not in e)
        d = next(x for x in tris[1] if x not in e)
        if fl.kind == "22":
            return make_flip22((u, v), (c, d), direction)
        if fl.kind == "31":
            link = [x for x in (u, v) if x != fl.vertex] + [c, d]
            return make_flip31(link, fl.vertex, direction)
        return None

    def commit(flip: Flip):
        nonlocal t
        t = apply_flip(t, flip, p.a)
        tets.append(tuple(sorted(flip.support)))
        flips.append(flip)
        stats["flips"] += 1
        touched = _region_edges(flip)
        tags.difference_update(touched)
        for e in touched:
            if t.has_edge(e):
                worklist.add(e)

    while True:
        progressed = False
        for e in sorted(worklist):
            if not t.has_edge(e):
                worklist.discard(e)
                continue
            if e in target_edges:
                worklist.discard(e)
                continue
            if e in tags:
                continue
            flip = lnr_flip_on(e)
            if flip is None:
                worklist.discard(e)
                continue
            stats["conformity_tests"] += 1
            if is_conforming_flip(flip, t, p):
                worklist.discard(e)
                commit(flip)
                progressed = True
                break
            tags.add(e)
        if progressed:
            continue
        inserted = False
        for v in sorted(set(p.target.vertices) - t.vertices):
            tri, loc = find_containing_triangle(t, p.a, p.a.point(v))
            if loc.kind != "inside":
                raise FlipforgeError(f"target vertex {v} sits on a section face")
            flip = make_flip13(tri, v, flip_direction(p.a, FLIP13, (*sorted(tri), v)))
            if flip.direction != direction:
                continue
            stats["conformity_tests"] += 1
            if is_conforming_flip(flip, t, p):
                commit(flip)
                tags.clear()
                inserted = True
                break
        if inserted:
            continue
        break

    if t == p.target:
        if direction == UP:
            lower, upper = p.source, p.target
        else:
            lower, upper = p.target, p.source
        x = Tetrahedralization(tets, lower, upper)
        seq = FlipSequence(p.source.canonical_key(), tuple(flips))
        return TriangulationOutcome(
            SUCCESS, tetrahedralization=x, sequence=seq, report=report, stats=stats
        )
    certificate = {
        "tagged_edges": tuple(sorted(tags)),
        "absent_target_vertices": tuple(sorted(set(p.target.vertices) - t.vertices)),
        "applied_flips": len(flips),
    }
    return TriangulationOutcome(
        INDECOMPOSABLE,
        stuck=t,
        certificate=certificate,
        report=report,
        stats=stats,
    )
