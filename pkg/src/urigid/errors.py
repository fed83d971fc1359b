"""Exception types shared across the package."""


class UrigidError(ValueError):
    """Base class for invariant violations and malformed inputs."""


class FrameworkError(UrigidError):
    """A graph or configuration violates a structural invariant."""


class NumericalError(UrigidError):
    """A matrix fails a numeric precondition (asymmetry, indefiniteness, ...)."""


class SchemaError(UrigidError):
    """Malformed JSON input; the message names the offending field."""
