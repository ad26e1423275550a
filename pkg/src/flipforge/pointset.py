"""Lifted planar point sets and the general-position scan."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Sequence

from .errors import DegenerateInput
from .geometry import convex_hull_cycle, det3, orient2d, sub3

Rat = Fraction


@dataclass(frozen=True)
class GeneralPositionReport:
    """Every planar collinear triple and lifted coplanar quadruple found."""

    collinear_triples: tuple
    coplanar_quadruples: tuple

    @property
    def ok(self) -> bool:
        return not self.collinear_triples and not self.coplanar_quadruples


def check_general_position(points: Sequence, heights: Sequence) -> GeneralPositionReport:
    """Scan a lifted point set for degeneracies.

    Degeneracy is data here, not an error: the report lists every planar
    collinear triple and every quadruple whose lifted points are coplanar.
    An empty report means the set is sufficiently generic for every
    construction in this package.
    """
    n = len(points)
    collinear = []
    for i, j, k in combinations(range(n), 3):
        if orient2d(points[i], points[j], points[k]) == 0:
            collinear.append((i, j, k))
    lifted = [(points[i][0], points[i][1], heights[i]) for i in range(n)]
    coplanar = []
    for i, j, k, m in combinations(range(n), 4):
        d = det3(
            sub3(lifted[j], lifted[i]),
            sub3(lifted[k], lifted[i]),
            sub3(lifted[m], lifted[i]),
        )
        if d == 0:
            coplanar.append((i, j, k, m))
    return GeneralPositionReport(tuple(collinear), tuple(coplanar))


class LiftedPointSet:
    """Labeled planar points with exact rational coordinates and heights.

    Labels are the dense integers 0..n-1.  Construction rejects sets that
    fail the general-position scan unless ``check=False`` is passed (used
    only by code that needs to probe candidate height assignments).
    """

    __slots__ = ("points", "heights", "__dict__")

    def __init__(self, points, heights, check: bool = True):
        pts = tuple((Fraction(x), Fraction(y)) for x, y in points)
        hts = tuple(Fraction(h) for h in heights)
        if len(pts) != len(hts):
            raise ValueError("points and heights must have equal length")
        if len(pts) < 3:
            raise ValueError("need at least 3 points")
        if len(set(pts)) != len(pts):
            raise DegenerateInput("duplicate planar points")
        if check:
            report = check_general_position(pts, hts)
            if not report.ok:
                raise DegenerateInput(
                    f"point set is not in general position: "
                    f"{len(report.collinear_triples)} collinear triples, "
                    f"{len(report.coplanar_quadruples)} lifted coplanar quadruples",
                    report=report,
                )
        self.points = pts
        self.heights = hts

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def labels(self) -> range:
        return range(len(self.points))

    def point(self, label: int):
        return self.points[label]

    def height(self, label: int) -> Fraction:
        return self.heights[label]

    def lifted(self, label: int):
        x, y = self.points[label]
        return (x, y, self.heights[label])

    @cached_property
    def hull_cycle(self) -> tuple:
        """Labels of the planar convex hull, counterclockwise."""
        return tuple(convex_hull_cycle(self.points))

    @cached_property
    def hull_labels(self) -> frozenset:
        return frozenset(self.hull_cycle)

    @cached_property
    def hull_edges(self) -> frozenset:
        cyc = self.hull_cycle
        return frozenset(
            tuple(sorted((cyc[i], cyc[(i + 1) % len(cyc)]))) for i in range(len(cyc))
        )

    @cached_property
    def interior_labels(self) -> frozenset:
        return frozenset(self.labels) - self.hull_labels

    def __eq__(self, other):
        if not isinstance(other, LiftedPointSet):
            return NotImplemented
        return self.points == other.points and self.heights == other.heights

    def __hash__(self):
        return hash((self.points, self.heights))

    def __repr__(self):
        return f"LiftedPointSet(n={self.n})"
