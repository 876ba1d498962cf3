"""Exception hierarchy shared across the package.

Exit-code mapping used by the CLI: ValidationError -> 2,
InternalCheckError -> 3, ResourceCapError -> 4.
"""


class ValidationError(ValueError):
    """Bad input: precondition or domain violation."""


class InternalCheckError(RuntimeError):
    """A cross-check that should always hold failed; indicates a bug."""


class ResourceCapError(RuntimeError):
    """A configured effort bound was exceeded before an answer was reached."""


class FactorizationIncomplete(ResourceCapError):
    """Factoring gave up within the configured budget; never a wrong answer."""


class PrecisionError(ValidationError):
    """A truncated series is too short for the requested operation."""
