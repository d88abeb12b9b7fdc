"""Exception hierarchy shared by all modules."""


class CtapError(Exception):
    """Base class for every error raised by this package."""


class GraphError(CtapError, ValueError):
    pass


class SemiBipartiteViolation(GraphError):
    """An edge joins two V1 vertices, or a V1 vertex carries a self-loop."""


class DuplicateEdge(GraphError):
    pass


class PartyPlacement(GraphError):
    """A party is not a V1 vertex, or is listed twice."""


class NoSuchVertex(GraphError, KeyError):
    pass


class InvalidParameter(CtapError, ValueError):
    pass


class GraphFormatError(CtapError, ValueError):
    """Malformed graph text file."""


class NotHermitian(CtapError, ValueError):
    pass


class DegenerateKernel(CtapError):
    """The zero eigenspace does not have dimension one."""

    def __init__(self, dim: int):
        super().__init__(f"zero eigenspace has dimension {dim}, expected 1")
        self.dim = dim


class PartyUnsupported(CtapError):
    """The zero eigenvector has no amplitude on a vertex that should be a party."""


class NoMatching(CtapError):
    pass


class InterlacingViolation(CtapError, AssertionError):
    pass


class SameEndpoints(CtapError, ValueError):
    pass


class InvalidSchedule(CtapError, ValueError):
    pass


class DarkStateUndefined(CtapError):
    pass


class IntegrationUnstable(CtapError, RuntimeError):
    pass


class TStarNotFound(CtapError, RuntimeError):
    def __init__(self, cap: float, best_error: float):
        super().__init__(f"no protocol time below {cap:g} reached the error threshold "
                         f"(best error seen {best_error:.4g})")
        self.cap = cap
        self.best_error = best_error
