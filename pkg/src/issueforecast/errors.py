"""Exception types shared across the package."""


class IssueForecastError(Exception):
    """Base class for all errors raised by this package."""


class InsufficientLengthError(IssueForecastError):
    """Series is too short for the requested operation."""


class ZeroVarianceError(IssueForecastError):
    """Operation is undefined on a constant series."""


class SingularRegressionError(IssueForecastError):
    """Regression design matrix is rank deficient."""


class DomainError(IssueForecastError):
    """Input lies outside the mathematical domain of a transform."""


class HorizonError(IssueForecastError):
    """Forecast horizon must be at least one step."""


class WindowMismatchError(IssueForecastError):
    """Series do not cover the requested window or are misaligned."""


class LengthMismatchError(IssueForecastError):
    """Paired sequences have different lengths."""


class EmptyInputError(IssueForecastError):
    """Operation requires at least one observation."""


class ConstantInputError(IssueForecastError):
    """Rank correlation is undefined for a constant sequence."""


class InvalidDfError(IssueForecastError):
    """Degrees of freedom must be positive."""


class InvalidRangeError(IssueForecastError):
    """Date range has end before start."""


class FormatError(IssueForecastError):
    """Cache file violates the documented format."""


class FetchError(IssueForecastError):
    """Base class for repository-API failures; carries the repo identifier."""

    def __init__(self, repo: str, message: str):
        super().__init__(f"{repo}: {message}")
        self.repo = repo


class AuthError(FetchError):
    pass


class RateLimitedError(FetchError):
    pass


class NotFoundError(FetchError):
    pass


class NetworkError(FetchError):
    pass
