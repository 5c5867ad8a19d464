"""Exception hierarchy shared by all pickcert modules."""


class PickCertError(Exception):
    """Base class for every error raised by pickcert."""


class ArgumentError(PickCertError, ValueError):
    """Invalid argument: wrong dimension, out-of-domain point, duplicates."""


class DominationError(ArgumentError):
    """A polynomial exponent exceeds the requested multidegree."""


class StabilityError(PickCertError):
    """Denominator polynomial vanishes inside the open polydisc."""


class SingularPointError(PickCertError, ZeroDivisionError):
    """Evaluation at a point where the denominator (numerically) vanishes."""


class ReductionUnstableError(PickCertError):
    """Common-root cancellation could not be decided reliably.

    ``diagnostics`` carries the offending root pairs and distances.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class DegenerateConfigurationError(PickCertError):
    """Two analytic discs coincide, so their intersection is not a point."""


class ConfigurationError(PickCertError):
    """A geometric search or configuration did not meet its invariants."""


class PreconditionError(PickCertError):
    """An operation was called outside of its documented precondition."""


class ReconstructionError(PickCertError):
    """A reconstructed interpolant failed post-validation."""


class NearUniqueError(PickCertError):
    """Value disc radius too small to separate two interpolants."""


class InapplicableError(PickCertError):
    """The requested demonstration does not apply to the given data."""


class SchemaError(PickCertError, ValueError):
    """Malformed JSON document; ``path`` locates the offending element."""

    def __init__(self, message, path="$"):
        super().__init__(f"{path}: {message}")
        self.path = path
