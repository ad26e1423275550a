"""The directed flip graph over all triangulations of a point set.

Nodes are canonical triangulation keys, arcs are directed flips of one
chosen direction.  Enumeration seeds from the lower extreme
triangulation and closes under undirected flips, which reaches every
triangulation of a planar point set.  Regularity of a single
triangulation is decided by exact rational linear feasibility over
candidate heights.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, NamedTuple, Optional, Tuple

from .errors import BudgetExceeded, NoExtremePair
from .feasibility import solve_feasibility_simplex
from .flips import Flip, FlipSequence, apply_flip, enumerate_directed_flips
from .geometry import cross2
from .lift3d import Tetrahedralization, sequence_to_tetrahedralization
from .pointset import LiftedPointSet
from .triangulation import (
    DOWN,
    LOWER,
    UP,
    UPPER,
    Triangulation,
    extreme_triangulation,
    find_containing_triangle,
)

DEFAULT_MAX_NODES = 10**6

NODE_LOWER_EXTREME = "lower_extreme"
NODE_UPPER_EXTREME = "upper_extreme"
NODE_UPPER_NON_EXTREME = "upper_non_extreme"
NODE_LOWER_NON_EXTREME = "lower_non_extreme"
NODE_INTERNAL = "internal"


def max_nodes_budget(explicit: Optional[int] = None) -> int:
    """The enumeration budget, overridable via FLIPFORGE_MAX_NODES."""
    if explicit is not None:
        return explicit
    env = os.environ.get("FLIPFORGE_MAX_NODES")
    return int(env) if env else DEFAULT_MAX_NODES


def enumerate_triangulations(
    a: LiftedPointSet, max_nodes: Optional[int] = None
) -> Dict[str, Triangulation]:
    """All triangulations of the point set, keyed canonically.

    Breadth-first closure from the lower extreme triangulation under
    undirected flips (both directions).  Raises BudgetExceeded rather
    than returning a truncated set.
    """
    budget = max_nodes_budget(max_nodes)
    start = extreme_triangulation(a, LOWER)
    seen = {start.canonical_key(): start}
    frontier = [start]
    while frontier:
        nxt = []
        for t in frontier:
            for direction in (UP, DOWN):
                for flip in enumerate_directed_flips(t, a, direction):
                    t2 = apply_flip(t, flip, a)
                    key = t2.canonical_key()
                    if key not in seen:
                        if len(seen) >= budget:
                            raise BudgetExceeded(
                                f"triangulation enumeration exceeded {budget} nodes"
                            )
                        seen[key] = t2
                        nxt.append(t2)
        frontier = nxt
    return seen


@dataclass(frozen=True)
class DirectedFlipGraph:
    """Nodes, arcs of one flip direction, and the two extreme keys."""

    direction: str
    nodes: Dict[str, Triangulation]
    arcs: Tuple[Tuple[str, str, Flip], ...]
    lower_extreme_key: str
    upper_extreme_key: str

    @property
    def out_arcs(self) -> Dict[str, list]:
        cache = self.__dict__.get("_out")
        if cache is None:
            cache = {k: [] for k in self.nodes}
            for src, dst, flip in self.arcs:
                cache[src].append((dst, flip))
            object.__setattr__(self, "_out", cache)
        return cache

    @property
    def in_degree(self) -> Dict[str, int]:
        cache = self.__dict__.get("_indeg")
        if cache is None:
            cache = {k: 0 for k in self.nodes}
            for _, dst, _ in self.arcs:
                cache[dst] += 1
            object.__setattr__(self, "_indeg", cache)
        return cache

    def sources(self) -> list:
        return sorted(k for k, d in self.in_degree.items() if d == 0)

    def sinks(self) -> list:
        out = self.out_arcs
        return sorted(k for k in self.nodes if not out[k])


def build_directed_flip_graph(
    a: LiftedPointSet, direction: str, max_nodes: Optional[int] = None
) -> DirectedFlipGraph:
    """The full directed flip graph of one direction."""
    nodes = enumerate_triangulations(a, max_nodes)
    arcs = []
    for key in sorted(nodes):
        t = nodes[key]
        for flip in enumerate_directed_flips(t, a, direction):
            t2 = apply_flip(t, flip, a)
            arcs.append((key, t2.canonical_key(), flip))
    return DirectedFlipGraph(
        direction=direction,
        nodes=nodes,
        arcs=tuple(arcs),
        lower_extreme_key=extreme_triangulation(a, LOWER).canonical_key(),
        upper_extreme_key=extreme_triangulation(a, UPPER).canonical_key(),
    )


def classify_nodes(g: DirectedFlipGraph, a: LiftedPointSet) -> Dict[str, str]:
    """Extreme, non-extreme (wrong-side sources and sinks), or internal.

    In an up graph, a sink other than the upper extreme can never reach
    it (upper non-extreme) and a source other than the lower extreme can
    never be reached from it going down (lower non-extreme); the down
    graph is the mirror image.
    """
    out = {}
    sources = set(g.sources())
    sinks = set(g.sinks())
    if g.direction == UP:
        stuck_up, stuck_down = sinks, sources
    else:
        stuck_up, stuck_down = sources, sinks
    for key in g.nodes:
        if key == g.lower_extreme_key:
            out[key] = NODE_LOWER_EXTREME
        elif key == g.upper_extreme_key:
            out[key] = NODE_UPPER_EXTREME
        elif key in stuck_up:
            out[key] = NODE_UPPER_NON_EXTREME
        elif key in stuck_down:
            out[key] = NODE_LOWER_NON_EXTREME
        else:
            out[key] = NODE_INTERNAL
    return out


class RegularityResult(NamedTuple):
    regular: bool
    witness: Optional[dict]


def _lifted_convexity_row(a: LiftedPointSet, base: tuple, apex: int, nvars: int):
    """Linear row asserting the lifted apex sits strictly above plane(base).

    The 3x3 determinant of the lifted points is linear in the heights;
    cofactors against the planar coordinates give the row, and the sign
    of the planar base orientation normalizes "above".
    """
    va, vb, vc = base
    pa, pb, pc, pd = (a.point(v) for v in (va, vb, vc, apex))
    c1 = cross2(pa, pc, pd)
    c2 = -cross2(pa, pb, pd)
    c3 = cross2(pa, pb, pc)
    base_sign = 1 if c3 > 0 else -1
    coeffs = [Fraction(0)] * nvars
    coeffs[vb] += c1
    coeffs[vc] += c2
    coeffs[apex] += c3
    coeffs[va] -= c1 + c2 + c3
    return ([c * base_sign for c in coeffs], Fraction(1))


def is_regular(t: Triangulation, a: LiftedPointSet) -> RegularityResult:
    """Decide regularity by exact feasibility over candidate heights.

    The triangulation is the lower envelope of some lift iff heights
    exist making every interior edge strictly locally convex and every
    absent vertex's lift strictly above its containing triangle's plane.
    The system is homogeneous, so strictness is equivalent to slack 1.
    A witness height function is returned when feasible.
    """
    nvars = a.n
    rows = []
    for e, tris in sorted(t.edge_map.items()):
        if len(tris) != 2:
            continue
        u, v = e
        c = next(x for x in tris[0] if x not in e)
        d = next(x for x in tris[1] if x not in e)
        rows.append(_lifted_convexity_row(a, (u, v, c), d, nvars))
    for p in sorted(set(a.labels) - t.vertices):
        tri, _ = find_containing_triangle(t, a, a.point(p))
        rows.append(_lifted_convexity_row(a, tri, p, nvars))
    witness = solve_feasibility_simplex(rows, nvars)
    if witness is None:
        return RegularityResult(False, None)
    return RegularityResult(True, {label: witness[label] for label in a.labels})


def maximal_paths(g: DirectedFlipGraph) -> Iterator[FlipSequence]:
    """Lazily enumerate all extreme-to-extreme directed paths.

    For an up graph these run lower extreme to upper extreme; for a down
    graph the reverse.  Depth-first with lexicographic arc order, so the
    enumeration order is deterministic.
    """
    if g.direction == UP:
        start, goal = g.lower_extreme_key, g.upper_extreme_key
    else:
        start, goal = g.upper_extreme_key, g.lower_extreme_key
    if start not in g.nodes or goal not in g.nodes:
        raise NoExtremePair("graph is missing an extreme triangulation")
    out = {
        k: sorted(v, key=lambda df: (df[1].support, df[1].kind))
        for k, v in g.out_arcs.items()
    }

    def walk(key: str, acc: List[Flip]) -> Iterator[FlipSequence]:
        if key == goal:
            yield FlipSequence(start, tuple(acc))
            return
        for dst, flip in out[key]:
            acc.append(flip)
            yield from walk(dst, acc)
            acc.pop()

    yield from walk(start, [])


def distinct_tetrahedralizations(
    g: DirectedFlipGraph, a: LiftedPointSet
) -> List[Tetrahedralization]:
    """Deduplicate all maximal paths by their tetrahedron sets."""
    start = g.nodes[g.lower_extreme_key if g.direction == UP else g.upper_extreme_key]
    seen: Dict[frozenset, Tetrahedralization] = {}
    for seq in maximal_paths(g):
        key = frozenset(tuple(sorted(f.support)) for f in seq.flips)
        if key not in seen:
            seen[key] = sequence_to_tetrahedralization(start, seq, a)
    return [seen[k] for k in sorted(seen, key=sorted)]


TWO_THREE = "two_three"
THREE_TWO = "three_two"


def tet_flip_adjacency(x1: Tetrahedralization, x2: Tetrahedralization) -> Optional[str]:
    """Detect whether two tetrahedralizations differ by one 3d flip.

    A 2-3 move replaces 2 tetrahedra sharing a face by 3 sharing an
    edge, both sides tiling the same 5-vertex bipyramid.  Detection is
    combinatorial: difference sizes (2, 3) with identical 5-label vertex
    sets on both sides.
    """
    d1 = x1.tet_set - x2.tet_set
    d2 = x2.tet_set - x1.tet_set
    sizes = (len(d1), len(d2))
    if sizes not in ((2, 3), (3, 2)):
        return None
    v1 = {v for t in d1 for v in t}
    v2 = {v for t in d2 for v in t}
    if v1 != v2 or len(v1) != 5:
        return None
    return TWO_THREE if sizes == (2, 3) else THREE_TWO
