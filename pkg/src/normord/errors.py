"""Exception types raised across the package."""


class CapacityError(ValueError):
    """A materialized table was requested beyond the configured cap."""


class PrecisionError(ArithmeticError):
    """Fixed-width accumulation cannot hold the requested sums exactly."""


class FitQualityError(ValueError):
    """A least-squares fit was requested on too narrow a range of data."""
