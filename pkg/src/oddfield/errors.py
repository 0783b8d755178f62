"""Exception hierarchy. The CLI maps each family to an exit code."""


class OddFieldError(Exception):
    """Base class for all package errors."""


class DimensionError(OddFieldError, ValueError):
    """Spacetime dimension is not odd or is below 5."""


class ContractError(OddFieldError, ValueError):
    """Arguments violate an operation's preconditions (shape, range, normalization)."""


class WorldlineError(OddFieldError):
    """Root-finding on a worldline failed."""


class NoRetardedRootError(WorldlineError):
    """The past light cone of the observation point does not meet the worldline."""


class LightconeDegeneracyError(WorldlineError):
    """R.v vanishes (observation point on the worldline); the 1/(R.v) Jacobian is singular."""


class QuadratureError(OddFieldError):
    """A quadrature, extrapolation or tail estimate did not converge."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
