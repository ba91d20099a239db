"""Exception and warning types shared across the package."""


class GkpError(Exception):
    """Base class for all package errors."""


class ValidationError(GkpError):
    """Invalid parameters, malformed configuration or schema violations."""


class NumericError(GkpError):
    """A numerical procedure failed to converge or produced invalid output."""


class SeedNotRequired(ValidationError):
    """Signals the codeword path: beta = 0 means no seed state is needed."""


class TruncationWarning(UserWarning):
    """Probability mass near the top of the truncated Fock ladder."""


class ParameterWarning(UserWarning):
    """Soft violation of a recommended parameter regime."""
