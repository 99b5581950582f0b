"""Exception types shared across the package."""


class SpinMarketError(Exception):
    """Base class for all spinmarket errors."""


class SizeMismatch(SpinMarketError):
    """Two configurations do not live on the same lattice."""


class InsufficientTail(SpinMarketError):
    """Too few samples above xmin for a power-law fit (need >= 10)."""


class DegenerateTail(SpinMarketError):
    """All tail samples are equal; the exponent is unidentifiable."""


class DegenerateSeries(SpinMarketError):
    """A series statistic was requested on data with zero variance."""


class MissingSnapshots(SpinMarketError):
    """A run directory holds no snapshot pairs compatible with the request."""


class RunDirLocked(SpinMarketError):
    """Another process owns the run directory's lock file."""
