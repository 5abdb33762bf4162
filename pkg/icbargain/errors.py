"""
Exceptions raised by icbargain.

Library code raises these; only the CLI turns them into exit codes.
"""


class BargainError(Exception):
    """Base class for all icbargain errors."""


class DomainError(BargainError, ValueError):
    """A numeric input is outside the domain of the operation."""


class PreconditionError(BargainError, ValueError):
    """An operation was called on inputs that violate its precondition."""


class EmptyFrontierError(BargainError):
    """No feasible point strictly dominates the disagreement point."""


class NotEssentialError(BargainError):
    """The bargaining problem is not essential."""


class NonRegularError(BargainError):
    """The individual rational efficient frontier is not strictly monotone."""


class BracketError(BargainError, ArithmeticError):
    """A root finder could not bracket a sign change."""

    def __init__(self, message: str, lo: float, hi: float, f_lo: float, f_hi: float):
        super().__init__(
            f"{message} (bracket [{lo:.12g}, {hi:.12g}], "
            f"residuals {f_lo:.3e} / {f_hi:.3e})"
        )
        self.lo = lo
        self.hi = hi
        self.f_lo = f_lo
        self.f_hi = f_hi


class ScenarioError(BargainError, ValueError):
    """A scenario file or flag value could not be used."""

    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        where = ""
        if line is not None:
            where += f"line {line}: "
        if key is not None:
            where += f"key '{key}': "
        super().__init__(f"{where}{message}")
        self.key = key
        self.line = line
