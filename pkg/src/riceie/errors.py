"""Exception types shared across the package."""


class RiceIeError(Exception):
    """Base class for all errors raised by riceie."""


class DomainError(RiceIeError, ValueError):
    """An argument lies outside the domain where a formula is defined."""


class ConvergenceError(RiceIeError, ArithmeticError):
    """A quadrature or series failed to reach the requested accuracy."""
