"""Exception types raised by qaop."""


class RankDeficientError(ValueError):
    """The data does not carry enough nonzero singular values."""


class DegenerateIterateError(ValueError):
    """An iterate collapsed (zero column space or a vanishing amplitude)."""


class BoundViolation(AssertionError):
    """A bound that the analysis guarantees was violated numerically.

    Raised as an assertion so that test suites treat it as a hard failure.
    """


class LedgerCapExceeded(ValueError):
    """Counted DYXL ledgers refuse more iterations than the recursion cap."""
