"""Exception hierarchy shared by all modules."""


class PulseGateError(Exception):
    """Base class for all errors raised by pulsegate."""


class DomainError(PulseGateError, ValueError):
    """An argument lies outside the domain where a model is valid."""


class GridError(PulseGateError, ValueError):
    """Two objects were sampled on incompatible grids."""


class TruncationError(GridError):
    """A spectral or spatial function does not fit inside its grid."""


class CoverageError(GridError):
    """An interpolated function is requested outside its sampled support."""


class GVMError(DomainError):
    """No group-velocity-matched solution exists in the search window.

    ``gaps`` holds the velocity differences (m/s) at the two window ends.
    """

    def __init__(self, message, gaps):
        super().__init__(message)
        self.gaps = gaps


class DegeneratePumpError(PulseGateError, ValueError):
    """The pump spectrum integrates to zero, so its peak amplitude is undefined."""


class EmptyJSAError(PulseGateError, ValueError):
    """Pump and phasematching functions have no common support on the grids."""


class ContractError(PulseGateError, ValueError):
    """An input violates a documented precondition (e.g. normalization)."""


class ConfigError(PulseGateError, ValueError):
    """Scenario or process configuration is incomplete or inconsistent."""


class ConvergenceError(PulseGateError, RuntimeError):
    """A numerical propagation did not meet its accuracy target."""


class RangeError(PulseGateError, ValueError):
    """A search interval does not bracket the requested extremum.

    ``endpoints`` holds ``(x, f(x))`` at both ends of the interval.
    """

    def __init__(self, message, endpoints):
        super().__init__(message)
        self.endpoints = endpoints
