"""Exception types shared across the package."""


class DataError(ValueError):
    """Malformed, missing or inconsistent input data."""


class DegenerateDataError(DataError):
    """Input carries no usable correlation structure (e.g. all inner products zero)."""


class SolverDivergence(RuntimeError):
    """An iterative solver produced non-finite values."""
