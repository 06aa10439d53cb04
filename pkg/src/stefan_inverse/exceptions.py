"""Exception types shared across the package."""


class StefanInverseError(Exception):
    """Base class for all package errors."""


class InvalidConfigError(StefanInverseError):
    """Grid or descent configuration violates a precondition."""


class DegenerateBoundaryError(StefanInverseError):
    """Free-boundary samples do not span a positive domain."""


class SingularSystemError(StefanInverseError):
    """A tridiagonal solve hit a zero pivot or produced non-finite values."""

    def __init__(self, level: int, message: str = ""):
        self.level = level
        super().__init__(message or f"singular system at time level {level}")


class ConstraintViolationError(StefanInverseError):
    """Control leaves the admissible set (s must stay positive, s(0) fixed)."""


class GridMismatchError(StefanInverseError):
    """Fields passed together were built on different grids."""


class OutOfRangeError(StefanInverseError):
    """Interpolation query outside the grid hull."""


class MissingMeasurementsError(StefanInverseError):
    """Cost evaluation requested without the required measurement set."""
