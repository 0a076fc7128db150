"""Exception hierarchy.

Input problems derive from :class:`DataError` (CLI exit code 2); numerical
failures derive from :class:`NumericalError` (CLI exit code 3).
"""


class FatcostError(Exception):
    """Base class for every error raised by this package."""


class DataError(FatcostError, ValueError):
    """Malformed input, failed validation or an out-of-domain argument."""


class EmptySampleError(DataError):
    pass


class NumericalError(FatcostError, ArithmeticError):
    """A fit or test could not produce a meaningful number."""


class EmptyTailError(NumericalError):
    pass


class DegenerateSampleError(NumericalError):
    pass


class ConvergenceError(NumericalError):
    """Optimizer ran out of budget.

    ``best`` holds the best parameter vector seen, ``diagnostics`` the
    optimizer bookkeeping (evaluations, final simplex diameter, restarts).
    """

    def __init__(self, message, best=None, diagnostics=None):
        super().__init__(message)
        self.best = best
        self.diagnostics = dict(diagnostics or {})
