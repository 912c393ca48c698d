"""Exception types shared across the package."""


class DraftLabError(Exception):
    """Base class for all draftlab errors."""


class ContractError(DraftLabError, ValueError):
    """A caller violated an operation's precondition (bad shapes, invalid
    rosters, self-pair queries, degenerate statistical input, ...)."""


class DataError(DraftLabError, ValueError):
    """A data file or record could not be parsed or validated."""


class NumericalError(DraftLabError, ArithmeticError):
    """Training or evaluation produced a non-finite value."""
