"""Exception hierarchy shared by all fluxdelta modules."""


class FluxDeltaError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(FluxDeltaError, ValueError):
    """Invalid parameters or configuration values.

    ``path`` names the offending field (e.g. ``circuit.alpha``) when known.
    """

    def __init__(self, message, path=None):
        self.path = path
        if path:
            message = f"{path}: {message}"
        super().__init__(message)


class NumericalError(FluxDeltaError, ArithmeticError):
    """Base class for failures of a numerical routine."""


class ConvergenceError(NumericalError):
    def __init__(self, message, iterations=None, f=None):
        self.iterations = iterations
        self.f = f
        if iterations is not None:
            message = f"{message} (after {iterations} iterations)"
        if f is not None:
            message = f"{message} [f={f!r}]"
        super().__init__(message)


class DegenerateLevelsError(NumericalError):
    pass


class AmbiguousStructureError(NumericalError):
    pass


class SingularParametrizationError(NumericalError):
    """Closed-form eigenvector parametrization breaks down at this point."""


class CrossingError(NumericalError):
    """Adiabatic levels are (near-)degenerate; couplings are undefined."""


class StepSizeError(NumericalError):
    pass


class IntegrationError(NumericalError):
    def __init__(self, message, time=None):
        self.time = time
        if time is not None:
            message = f"{message} (at t={time!r})"
        super().__init__(message)
