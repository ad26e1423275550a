"""Exception types shared across the package."""


class FlipforgeError(Exception):
    """Base class for all domain errors raised by this package."""


class DegenerateBase(FlipforgeError):
    """A predicate was asked about a plane through three collinear points."""


class DegenerateInput(FlipforgeError):
    """A point set failed the general-position scan.

    Carries the offending report on the ``report`` attribute.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class DegenerateLift(FlipforgeError):
    """A lifted convex hull has a non-vertical facet with more than 3 vertices."""


class EdgeNotInTriangulation(FlipforgeError):
    pass


class HullEdge(FlipforgeError):
    """The requested operation needs an interior edge but got a hull edge."""


class NotApplicable(FlipforgeError):
    """A flip cannot be applied to the given triangulation."""


class OutsideDomain(FlipforgeError):
    """A query point lies outside the convex hull of the point set."""


class NotMonotone(FlipforgeError):
    """A flip sequence mixes up-flips and down-flips."""


class NotStuck(FlipforgeError):
    """A stuck-state certificate was requested for a state that is not stuck."""


class DegenerateDirection(FlipforgeError):
    """A projection direction is zero or collapses a cell to zero area."""


class ProjectionCollision(FlipforgeError):
    """Two lifted vertices project to the same planar point."""


class NonTriangulatedSilhouette(FlipforgeError):
    """A reprojected boundary does not form two valid planar triangulations."""


class BudgetExceeded(FlipforgeError):
    """An enumeration grew past the configured node budget."""


class NoExtremePair(FlipforgeError):
    """A directed flip graph is missing one of its two extreme nodes."""


class GenerationFailed(FlipforgeError):
    """A dataset generator exhausted its parameter schedule without verifying."""
