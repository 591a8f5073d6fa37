"""Exception hierarchy.

Every error raised on purpose by the toolkit derives from :class:`DiracResError`
so callers (and the CLI) can separate validation problems from numerical ones.
"""


class DiracResError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(DiracResError, ValueError):
    """Input violates a documented precondition."""


class IncompatibleDomainError(ValidationError):
    """Two objects live on different supports or grids."""


class DomainError(ValidationError):
    """Argument outside the domain of an operation (e.g. a zero in the closed upper half-plane)."""


class ShiftRejectedError(DomainError):
    """A shifted resonance lands in the closed upper half-plane."""

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class MismatchError(ValidationError):
    """A declared zero is not a zero of the source function."""


class NumericalError(DiracResError, ArithmeticError):
    """A numerical procedure failed."""


class RangeOverflowError(NumericalError, OverflowError):
    """Exponential growth exceeded the floating point range."""

    def __init__(self, message, cell=None):
        super().__init__(message)
        self.cell = cell


class ResolutionError(NumericalError):
    """A discrete transform does not resolve the support (leakage too large)."""


class UndersampledError(NumericalError):
    """Phase jumps between neighbouring samples are too large to unwrap."""


class DegenerateError(NumericalError):
    """Not enough data for the requested fit or evaluation."""


class BoundaryError(NumericalError):
    """A zero sits on (or numerically too close to) a counting contour."""


class UnresolvedCellError(NumericalError):
    """Root polishing failed in a cell that is known to hold zeros."""

    def __init__(self, message, cell=None):
        super().__init__(message)
        self.cell = cell


class ConvergenceError(NumericalError):
    """An iterative series or solver did not converge."""


class ConstructionError(NumericalError):
    """A constructed object fails its class membership check."""


class DivisionError(NumericalError, ZeroDivisionError):
    """Division by a value numerically indistinguishable from zero."""


class FileFormatError(DiracResError, OSError):
    """A data file is unreadable or lacks required fields."""
