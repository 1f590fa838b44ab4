"""Exception types shared across the package."""


class SwlagError(Exception):
    """Base class for all package errors."""


class InvalidConfigError(SwlagError):
    """Rejected mesh/scheme/run configuration."""


class MeshTanglingError(SwlagError):
    """Node ordering lost (x_s <= 0); the simulation cannot continue."""

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


class SingularStencilError(SwlagError):
    """Degenerate layer spacing inside a 9-point stencil."""


class SingularFluxError(SwlagError):
    """Vanishing denominator in the two-level pressure flux."""

    def __init__(self, message: str, cell: int | None = None):
        super().__init__(message)
        self.cell = cell


class NonConvergenceError(SwlagError):
    """Iterative solve exceeded its iteration cap."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class NumericalBlowupError(SwlagError):
    """NaN/Inf appeared during an iterative solve."""


class VacuumError(SwlagError):
    """Piston withdrawal fast enough to form a vacuum region."""


class OracleDomainError(SwlagError):
    """Oracle called outside the wave family it describes."""


class SingularRepresentationError(SwlagError):
    """Vanishing denominator in the invariant representation."""


class BreakdownError(SwlagError):
    """No positive real branch in a reduced-equation update."""


class ConfigError(SwlagError):
    """Bad key/value content in a run configuration file or flags."""
