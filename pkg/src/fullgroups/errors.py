"""Exception taxonomy shared by all modules.

Every error class maps to a distinct CLI exit code (see cli.EXIT_CODES).
"""


class FullgroupsError(Exception):
    """Base class for all package errors."""


class BackendMismatch(FullgroupsError):
    """Operands belong to different group backends."""


class InvalidGroupSpec(FullgroupsError):
    """A group table violates one of the required laws."""


class Inconclusive(FullgroupsError):
    """A bounded search could not certify either branch."""


class CapExceeded(FullgroupsError):
    """A construction would exceed the configured vertex cap."""


class BoundaryRisk(FullgroupsError):
    """A geodesic query is not guaranteed to stay inside the ball."""


class Unreachable(FullgroupsError):
    """No path between the requested vertices."""


class NoEscape(FullgroupsError):
    """No escape constant exists within the probe radius."""


class NotSubgroup(FullgroupsError):
    """The supplied elements are not closed under the group operations."""


class NotCommuting(FullgroupsError):
    """The stabilizer does not commute with the infinite cyclic normal subgroup."""


class InfiniteStabilizer(FullgroupsError):
    """The stabilizer meets the infinite cyclic normal subgroup nontrivially."""


class NotBijective(FullgroupsError):
    """Piecewise data does not define a bijection of the orbit."""


class InternalInconsistency(FullgroupsError):
    """An invariant that should be impossible to violate was violated."""


class PreconditionFailed(FullgroupsError):
    """A documented operation precondition does not hold."""


class PlacementConflict(FullgroupsError):
    """Two placements tried to write different colors on one edge."""


class BallTooSmall(FullgroupsError):
    """The ball radius cannot accommodate the requested construction."""


class NoInteriorCenters(FullgroupsError):
    """The sweep radius leaves no center with a full ball inside the domain."""


class NoMarkedCopy(FullgroupsError):
    """The coloring contains no marked copy of the requested word."""


class InsufficientWindow(FullgroupsError):
    """A configuration window is too small to decide the operation."""


class BoundaryClipped(FullgroupsError):
    """The requested pattern ball sticks out of the colored domain."""


class WindowTooSmall(FullgroupsError):
    """The walk window cannot contain the requested number of steps."""
