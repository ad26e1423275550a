"""Directed elementary flips and the directed Lawson algorithm.

A flip is a 2-2 edge exchange, a 1-3 vertex insertion, or a 3-1 vertex
deletion.  Each flip owns a 4-point support whose lifted copy is a
tetrahedron; exchanging the tetrahedron's lower faces for its upper
faces is an up-flip, the reverse a down-flip.  A monotone run of one
direction glues pairwise distinct tetrahedra, which bounds its length
and makes it terminate.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, List, NamedTuple, Optional, Sequence

import networkx as nx

from .errors import FlipforgeError, NotApplicable, NotStuck
from .geometry import NEG, POS, orient3d_lifted, point_in_triangle
from .pointset import LiftedPointSet
from .triangulation import (
    DOWN,
    EDGE_LOCALLY_NON_REGULAR,
    LOWER,
    UP,
    UPPER,
    Triangulation,
    classify_edge,
    classify_flippability,
    extreme_triangulation,
    find_containing_triangle,
)

FLIP22 = "22"
FLIP13 = "13"
FLIP31 = "31"

REACHED_EXTREME = "reached_extreme"
STUCK_NON_EXTREME = "stuck_non_extreme"


@dataclass(frozen=True, order=True)
class Flip:
    """A directed elementary move.

    Support role conventions:

    * "22": (a, b, c, d) with old edge ab and new edge cd (each pair sorted).
    * "13": (a, b, c, d) inserts vertex d into triangle abc (abc sorted).
    * "31": (a, b, c, d) removes vertex d whose link is abc (abc sorted).
    """

    kind: str
    support: tuple
    direction: str

    def __post_init__(self):
        if self.kind not in (FLIP22, FLIP13, FLIP31):
            raise ValueError(f"bad flip kind {self.kind!r}")
        if self.direction not in (UP, DOWN):
            raise ValueError(f"bad flip direction {self.direction!r}")
        if len(self.support) != 4 or len(set(self.support)) != 4:
            raise ValueError(f"bad flip support {self.support!r}")

    @property
    def support_key(self) -> tuple:
        return tuple(sorted(self.support))

    def inverse(self) -> "Flip":
        other = UP if self.direction == DOWN else DOWN
        a, b, c, d = self.support
        if self.kind == FLIP22:
            return Flip(FLIP22, (c, d, a, b), other)
        if self.kind == FLIP13:
            return Flip(FLIP31, self.support, other)
        return Flip(FLIP13, self.support, other)

    def alias(self) -> str:
        """Short human-readable name, e.g. "34-56" or "123-4"."""
        a, b, c, d = self.support
        sep = "" if max(self.support) <= 9 else ","
        if self.kind == FLIP22:
            return f"{a}{sep}{b}-{c}{sep}{d}"
        if self.kind == FLIP13:
            return f"{d}-{a}{sep}{b}{sep}{c}"
        return f"{a}{sep}{b}{sep}{c}-{d}"


def make_flip22(old_edge, new_edge, direction) -> Flip:
    (a, b), (c, d) = sorted(old_edge), sorted(new_edge)
    return Flip(FLIP22, (a, b, c, d), direction)


def make_flip13(triangle, vertex, direction) -> Flip:
    a, b, c = sorted(triangle)
    return Flip(FLIP13, (a, b, c, vertex), direction)


def make_flip31(link, vertex, direction) -> Flip:
    a, b, c = sorted(link)
    return Flip(FLIP31, (a, b, c, vertex), direction)


@dataclass(frozen=True)
class FlipSequence:
    """An ordered run of flips from a starting triangulation key."""

    start_key: str
    flips: tuple

    @property
    def is_monotone(self) -> bool:
        return len({f.direction for f in self.flips}) <= 1

    @property
    def direction(self) -> Optional[str]:
        return self.flips[0].direction if self.flips else None

    def __len__(self):
        return len(self.flips)


def flip_direction(a: LiftedPointSet, kind: str, support, t_before: Optional[Triangulation] = None) -> str:
    """The direction of a flip, decided by one lifted orientation test.

    Down means the support tetrahedron's upper faces are present before
    the flip.  When ``t_before`` is given, applicability is verified
    first.
    """
    if t_before is not None:
        _check_applicable(t_before, kind, support, a)
    pa, pb, pc, pd = (a.lifted(v) for v in support)
    s = orient3d_lifted(pa, pb, pc, pd)
    if s == 0:
        raise NotApplicable(f"degenerate support tetrahedron {support}")
    if kind in (FLIP22, FLIP13):
        return DOWN if s == NEG else UP
    return DOWN if s == POS else UP


def _check_applicable(t: Triangulation, kind: str, support, a: Optional[LiftedPointSet]):
    va, vb, vc, vd = support
    if kind == FLIP22:
        old1, old2 = tuple(sorted((va, vb, vc))), tuple(sorted((va, vb, vd)))
        if not (t.has_triangle(old1) and t.has_triangle(old2)):
            raise NotApplicable(f"2-2 flip {support}: old triangles missing")
        if a is not None:
            from .geometry import orient2d

            if (
                orient2d(a.point(vc), a.point(vd), a.point(va))
                * orient2d(a.point(vc), a.point(vd), a.point(vb))
                >= 0
            ):
                raise NotApplicable(f"2-2 flip {support}: support is not strictly convex")
    elif kind == FLIP13:
        tri = tuple(sorted((va, vb, vc)))
        if not t.has_triangle(tri):
            raise NotApplicable(f"1-3 flip {support}: triangle {tri} missing")
        if vd in t.vertices:
            raise NotApplicable(f"1-3 flip {support}: vertex {vd} already present")
        if a is not None:
            loc = point_in_triangle(a.point(vd), a.point(va), a.point(vb), a.point(vc))
            if loc.kind != "inside":
                raise NotApplicable(f"1-3 flip {support}: vertex {vd} not strictly inside")
    else:
        star = [tuple(sorted((va, vb, vd))), tuple(sorted((vb, vc, vd))), tuple(sorted((va, vc, vd)))]
        for tri in star:
            if not t.has_triangle(tri):
                raise NotApplicable(f"3-1 flip {support}: star triangle {tri} missing")
        deg = t.vertex_degree.get(vd, 0)
        if deg != 3:
            raise NotApplicable(f"3-1 flip {support}: vertex {vd} has degree {deg}")


def apply_flip(t: Triangulation, f: Flip, a: Optional[LiftedPointSet] = None) -> Triangulation:
    """Apply a flip, returning the new triangulation.

    Geometric applicability (convex support, strict insideness) is
    verified when the point set is supplied; the combinatorial
    preconditions are always checked.
    """
    _check_applicable(t, f.kind, f.support, a)
    va, vb, vc, vd = f.support
    if f.kind == FLIP22:
        return t.replace(
            remove=[(va, vb, vc), (va, vb, vd)],
            add=[(vc, vd, va), (vc, vd, vb)],
        )
    if f.kind == FLIP13:
        return t.replace(
            remove=[(va, vb, vc)],
            add=[(va, vb, vd), (vb, vc, vd), (va, vc, vd)],
        )
    return t.replace(
        remove=[(va, vb, vd), (vb, vc, vd), (va, vc, vd)],
        add=[(va, vb, vc)],
    )


def _edge_flip_candidate(t: Triangulation, a: LiftedPointSet, e, direction: str) -> Optional[Flip]:
    """The directed flip available on a locally non-regular edge, if any."""
    if classify_edge(t, e, a, direction) != EDGE_LOCALLY_NON_REGULAR:
        return None
    fl = classify_flippability(t, e, a)
    u, v = tuple(sorted(e))
    if fl.kind == "22":
        tris = t.edge_triangles(e)
        c = next(x for x in tris[0] if x not in (u, v))
        d = next(x for x in tris[1] if x not in (u, v))
        flip = make_flip22((u, v), (c, d), direction)
    elif fl.kind == "31":
        tris = t.edge_triangles(e)
        c = next(x for x in tris[0] if x not in (u, v))
        d = next(x for x in tris[1] if x not in (u, v))
        link = [x for x in (u, v) if x != fl.vertex] + [c, d]
        flip = make_flip31(link, fl.vertex, direction)
    else:
        return None
    # local non-regularity in a direction and the flip having that
    # direction are the same determinant sign; keep the cross-check cheap
    got = flip_direction(a, flip.kind, flip.support)
    if got != direction:
        raise FlipforgeError(f"direction mismatch on edge {e}: {got} != {direction}")
    return flip


def _insertion_candidates(t: Triangulation, a: LiftedPointSet, direction: str) -> List[Flip]:
    out = []
    for p in sorted(set(a.labels) - t.vertices):
        tri, loc = find_containing_triangle(t, a, a.point(p))
        if loc.kind != "inside":
            raise FlipforgeError(f"absent vertex {p} sits on a face of the triangulation")
        flip = make_flip13(tri, p, flip_direction(a, FLIP13, (*sorted(tri), p)))
        if flip.direction == direction:
            out.append(flip)
    return out


def enumerate_directed_flips(t: Triangulation, a: LiftedPointSet, direction: str) -> List[Flip]:
    """Every applicable flip of one direction, in deterministic order."""
    found = {}
    for e in t.edges:
        if len(t.edge_triangles(e)) == 1:
            continue
        flip = _edge_flip_candidate(t, a, e, direction)
        if flip is not None:
            found[(flip.support, flip.kind)] = flip
    for flip in _insertion_candidates(t, a, direction):
        found[(flip.support, flip.kind)] = flip
    return [found[k] for k in sorted(found)]


class FirstPolicy:
    """Always take the top of the candidate stack (lowest labels first)."""

    def pick(self, count: int, step: int) -> int:
        return count - 1


class IndexedPolicy:
    """Pick prescribed positions (from the top) for the first steps."""

    def __init__(self, indices: Sequence[int]):
        self.indices = tuple(indices)

    def pick(self, count: int, step: int) -> int:
        if step < len(self.indices):
            return (count - 1 - self.indices[step]) % count
        return count - 1


class SeededRandomPolicy:
    """Uniformly random picks from a seeded generator."""

    def __init__(self, seed: int):
        self.rng = random.Random(seed)

    def pick(self, count: int, step: int) -> int:
        return self.rng.randrange(count)


def parse_policy(text: str):
    """Parse "first", "random:SEED", or "indexed:i,j,k" policy strings."""
    if text == "first":
        return FirstPolicy()
    if text.startswith("random:"):
        return SeededRandomPolicy(int(text.split(":", 1)[1]))
    if text.startswith("indexed:"):
        part = text.split(":", 1)[1]
        return IndexedPolicy([int(x) for x in part.split(",") if x])
    raise ValueError(f"unknown policy {text!r}")


class LawsonResult(NamedTuple):
    final: Triangulation
    sequence: FlipSequence
    status: str


def _boundary_edges(flip: Flip) -> list:
    a, b, c, d = flip.support
    if flip.kind == FLIP22:
        return [tuple(sorted(e)) for e in ((a, c), (a, d), (b, c), (b, d))]
    return [tuple(sorted(e)) for e in ((a, b), (b, c), (a, c))]


def lawson_directed(
    t0: Triangulation,
    a: LiftedPointSet,
    direction: str,
    policy=None,
    max_flips: Optional[int] = None,
) -> LawsonResult:
    """Directed Lawson flipping with a deduplicated LIFO candidate stack.

    Pops candidate edges, flips the locally non-regular flippable ones in
    the requested direction, and pushes the support boundary edges after
    each flip.  When the stack drains, absent vertices whose insertion
    has the right direction are inserted and flipping resumes.  The
    status reports whether the run ended at the extreme triangulation of
    the matching side.
    """
    policy = policy or FirstPolicy()
    t = t0
    # descending sort so the default top-of-stack pop takes lowest labels
    stack = sorted(t0.edges, reverse=True)
    member = set(stack)
    applied: List[Flip] = []
    seen_supports = set()
    budget = max_flips if max_flips is not None else 4 * a.n * a.n + 16
    step = 0

    def push(edges):
        for e in sorted(edges, reverse=True):
            if e not in member:
                stack.append(e)
                member.add(e)

    while True:
        while stack:
            idx = policy.pick(len(stack), step)
            e = stack.pop(idx)
            member.discard(e)
            if not t.has_edge(e) or len(t.edge_triangles(e)) == 1:
                continue
            flip = _edge_flip_candidate(t, a, e, direction)
            if flip is None:
                continue
            t = apply_flip(t, flip, a)
            if flip.support_key in seen_supports:
                raise FlipforgeError("monotone run revisited a support tetrahedron")
            seen_supports.add(flip.support_key)
            applied.append(flip)
            step += 1
            if len(applied) > budget:
                raise FlipforgeError("flip budget exceeded; not terminating")
            push(_boundary_edges(flip))
        inserts = _insertion_candidates(t, a, direction)
        if not inserts:
            break
        # descending so the default pick takes the lowest vertex label
        inserts.sort(reverse=True)
        flip = inserts[policy.pick(len(inserts), step)]
        t = apply_flip(t, flip, a)
        if flip.support_key in seen_supports:
            raise FlipforgeError("monotone run revisited a support tetrahedron")
        seen_supports.add(flip.support_key)
        applied.append(flip)
        step += 1
        push(_boundary_edges(flip))

    goal = extreme_triangulation(a, LOWER if direction == DOWN else UPPER)
    status = REACHED_EXTREME if t == goal else STUCK_NON_EXTREME
    return LawsonResult(t, FlipSequence(t0.canonical_key(), tuple(applied)), status)


@dataclass(frozen=True)
class StuckCertificate:
    """Cycles of unflippable locally non-regular edges in a stuck state.

    ``edge_cycles`` lists each elementary blocking cycle as a list of
    edges; ``redundant_vertices`` are the interior vertices on those
    cycles, the ones no monotone run of this direction can remove.
    """

    redundant_vertices: frozenset
    edge_cycles: tuple


def blocking_graph(t: Triangulation, a: LiftedPointSet, direction: str) -> list:
    """Arcs (v, blocker) for unflippable locally non-regular edges."""
    arcs = []
    for e in t.edges:
        if len(t.edge_triangles(e)) == 1:
            continue
        if classify_edge(t, e, a, direction) != EDGE_LOCALLY_NON_REGULAR:
            continue
        fl = classify_flippability(t, e, a)
        if fl.kind != "unflippable":
            continue
        u, v = tuple(sorted(e))
        other = u if fl.vertex == v else v
        arcs.append((other, fl.vertex))
    return arcs


def stuck_certificate(t: Triangulation, a: LiftedPointSet, direction: str) -> StuckCertificate:
    """Certify a stuck non-extreme state by its blocking-edge cycles."""
    if enumerate_directed_flips(t, a, direction):
        raise NotStuck("triangulation still has directed flips")
    goal = extreme_triangulation(a, LOWER if direction == DOWN else UPPER)
    if t == goal:
        raise NotStuck("triangulation is the extreme node of this direction")
    g = nx.DiGraph()
    g.add_edges_from(blocking_graph(t, a, direction))
    cycles = []
    for cyc in nx.simple_cycles(g):
        k = cyc.index(min(cyc))
        cycles.append(tuple(cyc[k:] + cyc[:k]))
    cycles.sort(key=lambda c: (len(c), c))
    if not cycles:
        raise FlipforgeError("stuck state has no blocking cycle; should be impossible")
    edge_cycles = tuple(
        tuple(tuple(sorted((cyc[i], cyc[(i + 1) % len(cyc)]))) for i in range(len(cyc)))
        for cyc in cycles
    )
    redundant = frozenset(v for cyc in cycles for v in cyc)
    return StuckCertificate(redundant, edge_cycles)
