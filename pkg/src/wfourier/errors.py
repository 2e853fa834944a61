"""Exception types shared across the package."""


class WfourierError(Exception):
    """Base class for package errors."""


class DivergentIntegral(WfourierError):
    """An integral required to be finite diverges.

    Carries the offending exponent (if known) so callers can report which
    endpoint breaks integrability.
    """

    def __init__(self, message, exponent=None):
        super().__init__(message)
        self.exponent = exponent


class InfiniteLevel(WfourierError):
    """The concave-majorant derivative is infinite for every argument.

    Raised when the cumulative integral of the input weight is infinite on
    every interval (0, x); concavity then forces the majorant to be infinite
    everywhere, so no finite level function exists.
    """


class InvalidProfile(WfourierError):
    """A measure-space profile payload is structurally unusable."""


class NonMonotoneInput(WfourierError):
    """An operation requiring a monotone input received a non-monotone one."""


class QuadratureNotConverged(WfourierError):
    """A quadrature result changed too much under refinement to be trusted."""


class OscillatoryQuadratureNotConverged(QuadratureNotConverged):
    """Panel refinement of an oscillatory integral failed to stabilize."""
