"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A configuration or argument value is outside its valid domain."""


class DegenerateTrialError(RuntimeError):
    """A channel realization produced a numerically unusable operating point
    (e.g. a zero-forcing gain below threshold, or a rank-deficient
    despread channel)."""


class ConvergenceError(RuntimeError):
    """An iterative solver failed to reach its tolerances within budget."""
