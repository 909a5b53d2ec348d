"""Exception types shared across the package."""


class SbpCloudError(Exception):
    """Base class for all package errors."""


class ParameterError(SbpCloudError, ValueError):
    """Invalid user-supplied parameter (counts, radii, empty selections)."""


class ConnectivityError(SbpCloudError):
    """Adjacency graph is not connected; carries one orphaned node id."""

    def __init__(self, message: str, orphan: int | None = None):
        super().__init__(message)
        self.orphan = orphan


class CompatibilityError(SbpCloudError):
    """Right-hand side is not orthogonal to the constant vector."""


class SolverError(SbpCloudError):
    """Iterative solve failed to reach the requested tolerance."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class StateError(SbpCloudError):
    """A physical state is outside the admissible set (e.g. rho <= 0)."""

    def __init__(self, message: str, node: int | None = None):
        super().__init__(message)
        self.node = node


class AdmissibilityError(StateError):
    """A time step produced an inadmissible state; carries time and node."""

    def __init__(self, message: str, node: int | None = None, time: float | None = None):
        super().__init__(message, node=node)
        self.time = time
