"""Exception hierarchy shared by all modules."""


class CodedCacheError(Exception):
    """Base class for all domain errors."""


class InvalidRequestError(CodedCacheError):
    """A request profile references a file index outside [0, N)."""


class InfeasibleConfigError(CodedCacheError):
    """A cache configuration stores fewer than M files."""


class CapacityError(CodedCacheError):
    """The feasible-set enumeration cap would be exceeded."""


class DistributionError(CodedCacheError):
    """A preference vector is not a valid probability distribution."""


class DegenerateGapError(CodedCacheError):
    """The stochastic optimum is tied, so gap-based bounds are undefined."""


class TraceFormatError(CodedCacheError):
    """A trace or ratings file failed to parse; carries a location."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class InsufficientCatalogError(CodedCacheError):
    """Fewer qualifying items than requested catalog size N."""


class InsufficientUsersError(CodedCacheError):
    """Some virtual user ended up with an empty request stream."""


class ScheduleError(CodedCacheError):
    """A switching schedule is malformed or out of range."""
