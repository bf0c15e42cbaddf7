"""Exception types shared across the library."""


class DomainError(ValueError):
    """An argument is outside the operation's mathematical domain."""


class SizeError(ValueError):
    """A requested computation exceeds its feasibility guard."""


class NumericalError(RuntimeError):
    """An iterative method failed to converge within its cap."""
