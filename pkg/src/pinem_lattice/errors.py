"""Exception hierarchy shared by the solvers and the I/O layer."""


class PinemError(Exception):
    """Base class for all package errors."""


class DomainError(PinemError, ValueError):
    """An input lies outside the domain of a physical formula."""


class NumericalGuardError(PinemError):
    """A numerical validity guard tripped during a run."""


class WindowOverflowError(NumericalGuardError):
    """Population reached the edge of the truncated sideband window."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class BoundaryMassError(NumericalGuardError):
    """The real-space envelope is not negligible at the grid boundary."""


class ConfigError(PinemError, ValueError):
    """A run configuration violates the schema or a sanity range."""

    def __init__(self, message, path=()):
        where = "/".join(str(p) for p in path)
        super().__init__(f"{where}: {message}" if where else message)
        self.path = tuple(path)


class GridMismatchError(PinemError, ValueError):
    """Two traces cannot be compared sample by sample."""
