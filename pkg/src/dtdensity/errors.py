"""Exception hierarchy shared by all modules."""


class GeometryError(ValueError):
    """Base class for invalid geometric input."""


class DegenerateTriangle(GeometryError):
    pass


class DuplicatePoints(GeometryError):
    def __init__(self, i, j):
        super().__init__(f"points {i} and {j} coincide")
        self.pair = (i, j)


class TooFewPoints(GeometryError):
    pass


class AllCollinear(GeometryError):
    pass


class NotGeneralPosition(GeometryError):
    """Raised with the first offending tuple of point indices."""

    def __init__(self, kind, indices):
        super().__init__(f"{kind} points {tuple(indices)}")
        self.kind = kind
        self.indices = tuple(indices)


class ContractError(ValueError):
    """A documented precondition was violated by the caller."""


class FlipError(GeometryError):
    pass


class BoundaryEdge(FlipError):
    pass


class NonConvexQuad(FlipError):
    pass


class NoSuchEdge(FlipError):
    pass


class InvalidExponent(ValueError):
    pass


class Truncated(RuntimeError):
    """Flip-graph enumeration stopped at its cap; results are inconclusive."""


class EmptyWindow(ValueError):
    pass


class DegenerateBasis(GeometryError):
    pass


class EmptyCore(ValueError):
    pass


class DisconnectedCore(ValueError):
    """Core complex is not edge-connected, or has holes."""


class AlphaExceedsSafeWindow(ValueError):
    pass


class InconsistentPeriodicMesh(ValueError):
    pass
