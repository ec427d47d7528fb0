"""Exception types shared across the package."""


class OTRError(Exception):
    """Base class. ``module`` names the component that raised."""

    def __init__(self, message, module=None):
        self.module = module
        if module:
            message = f"[{module}] {message}"
        super().__init__(message)


class ValidationError(OTRError, ValueError):
    """Bad input: malformed data, invalid configuration, unmet precondition."""


class NumericalError(OTRError, ArithmeticError):
    """A computation produced non-finite values or failed to converge."""
