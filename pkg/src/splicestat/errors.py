"""Exception types shared across the package."""


class SpliceStatError(Exception):
    """Base class for all splicestat errors."""


class InvalidInput(SpliceStatError):
    """An argument violates an operation's preconditions."""


class InsufficientData(SpliceStatError):
    """Too few samples or rows to carry out the computation."""


class DegenerateDistribution(SpliceStatError):
    """The data admit no meaningful fit (zero variance, all-zero samples)."""


class ConvergenceFailure(SpliceStatError):
    """An iterative solver failed to reach its tolerance."""


class SchemaError(SpliceStatError):
    """A file's schema version or column layout does not match expectations."""
