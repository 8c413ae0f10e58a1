"""Exception hierarchy shared by all modules."""

from __future__ import annotations

from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from src.core.models import FrontierArchive, TrainTrace


class ParetoForecastError(Exception):
    """Base class for errors raised by this package."""

    pass


class ContractViolationError(ParetoForecastError, ValueError):
    """Raised when a caller breaks an operation's precondition."""

    pass


class DivergenceError(ParetoForecastError):
    """Raised when a gradient or a parameter update becomes non-finite.

    The trace collected up to the failing step travels with the error; exploration
    loops additionally attach the archive they had built so far.
    """

    def __init__(
        self,
        message: str,
        step: int,
        trace: TrainTrace | None = None,
        archive: FrontierArchive | None = None,
    ) -> None:
        super().__init__(message)
        self.message = message
        self.step = step
        self.trace = trace
        self.archive = archive

    def __str__(self) -> str:
        return f"{self.message} (step {self.step})"


class UndefinedMetricError(ParetoForecastError, ValueError):
    """Raised when a volume-weighted metric has a zero denominator."""

    pass


class InvalidConstraintError(ParetoForecastError, ValueError):
    """Raised for constraint sets that cannot be enumerated."""

    pass


class ConstraintParseError(InvalidConstraintError):
    """Raised when a constraint token cannot be parsed."""

    def __init__(self, message: str, token: str, position: int) -> None:
        super().__init__(f"{message}: {token!r} (token {position})")
        self.token = token
        self.position = position


class DataFormatError(ParetoForecastError, ValueError):
    """Raised when a demand file has a malformed row."""

    def __init__(self, message: str, line: int, detail: Any = None) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.detail = detail
