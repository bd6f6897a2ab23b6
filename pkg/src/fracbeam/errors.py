class NumericalError(RuntimeError):
    """A numerical routine failed: divergence, NaN/Inf, or non-convergence."""
