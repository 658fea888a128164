"""Exception hierarchy shared by the geometry, strategy and engine layers."""


class TripursuitError(Exception):
    """Base class for every error raised by this package."""


class GeometryError(TripursuitError):
    pass


class NotATriangle(GeometryError):
    """The evader's Voronoi cell is unbounded or degenerate."""


class NumericalDegeneracy(GeometryError):
    """Two bisectors are (numerically) parallel or labels are inconsistent."""


class EvaderOutsideCell(GeometryError):
    pass


class DegenerateCell(GeometryError):
    """The evader is not strictly interior to the cell it is measured against."""


class DegenerateDirections(TripursuitError):
    """Relative-position directions do not surround the evader."""


class ParallelLines(TripursuitError):
    pass


class PolicyError(TripursuitError):
    pass


class GameOver(PolicyError):
    """A time-indexed plan was queried past its total duration."""


class OutOfFamily(PolicyError):
    pass


class AssumptionViolated(PolicyError):
    pass
