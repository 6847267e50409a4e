"""Exception hierarchy for geomgate.

Two broad failure families matter to callers (and to the CLI exit codes):
invalid input (``ValidationError`` and friends) versus a numerical routine
that could not reach its accuracy target (``NumericError`` and friends).
"""


class GeomGateError(Exception):
    """Base class for all geomgate errors."""


class ValidationError(GeomGateError):
    """Raised when inputs violate a documented precondition."""


class ConfigError(ValidationError):
    """Raised for malformed configuration or schedule files."""


class OutOfRangeError(ValidationError):
    """Raised when a numeric parameter lies outside its admissible range."""


class NumericError(GeomGateError):
    """Raised when an iterative/numerical routine fails to converge."""


class SingularPathError(NumericError):
    """Raised when a Bloch-path operation hits a genuine singularity."""


class AmbiguityError(ValidationError):
    """Raised when a geometric construction is ill-posed (e.g. antipodal endpoints)."""
