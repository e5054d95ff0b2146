"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or inconsistent input (shape mismatch, bad selection, ...)."""


class WorkCapExceeded(RuntimeError):
    """A combinatorial search hit its configured work limit."""


class ChainInfeasible(InputError):
    """No nested chain of centralizer projections realizes the requested sampling."""
