"""Exception types raised by the numerical routines."""


class DomainError(ValueError):
    """A scalar function was applied outside its domain."""


class NotPSDError(ValueError):
    """An operator expected to be positive semidefinite is not."""


class NumericDegradationError(ArithmeticError):
    """A result that should be real or symmetric carries too much residue."""


class MagnitudeError(OverflowError):
    """An exponent exceeded the overflow threshold."""


class SaturationError(OverflowError):
    """The quantum Young function is infinite at the requested point."""


class ConvergenceError(RuntimeError):
    """An iterative solver hit its iteration cap."""
