"""Exception hierarchy and per-component error recording."""

import traceback
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Any, Dict, List, Optional

from loguru import logger
from pydantic import ValidationError


class LawbenchError(Exception):
    """Base class for every error raised by lawbench."""


class BudgetExceeded(LawbenchError):
    """A budgeted search ran out of budget. Never stands in for a wrong value."""

    def __init__(self, budget: int, what: str = "search"):
        self.budget = budget
        self.what = what
        super().__init__(f"{what} exceeded budget {budget}")


class MemoryBudgetExceeded(LawbenchError):
    def __init__(self, used_mb: float, budget_mb: float):
        self.used_mb = used_mb
        self.budget_mb = budget_mb
        super().__init__(f"memory use {used_mb:.0f} MB exceeds budget {budget_mb:.0f} MB")


class NotFound(LawbenchError):
    pass


class NotFoundWithin(NotFound):
    def __init__(self, max_len: int, what: str = "law"):
        self.max_len = max_len
        super().__init__(f"no {what} of length <= {max_len}")


class LengthBoundViolated(LawbenchError):
    pass


class CertificateFailure(LawbenchError):
    pass


class ConfigurationError(LawbenchError, ValueError):
    pass


class MalformedWord(LawbenchError, ValueError):
    pass


class InvalidGenerator(MalformedWord):
    pass


class MalformedCycle(LawbenchError, ValueError):
    pass


class DyadicOverflow(LawbenchError):
    pass


class UnresolvedWitness(LawbenchError):
    def __init__(self, index: int, materialized: int):
        self.index = index
        self.materialized = materialized
        super().__init__(f"witness index {index} not materialized (have {materialized})")


# Parse and parameter errors exit with 2, everything else with 1.
USAGE_ERRORS = (ConfigurationError, MalformedWord, MalformedCycle, ValidationError)


class ErrorSeverity(Enum):
    DEBUG = "debug"
    INFO = "info"
    WARNING = "warning"
    ERROR = "error"
    CRITICAL = "critical"


@dataclass
class ErrorContext:
    timestamp: datetime
    component: str
    operation: str
    severity: ErrorSeverity
    error_type: str
    error_message: str
    stack_trace: Optional[str] = None
    additional_data: Optional[Dict[str, Any]] = None
    error_class: type = field(default=Exception, repr=False)

    @property
    def exit_code(self) -> int:
        return 2 if issubclass(self.error_class, USAGE_ERRORS) else 1

    def summary(self) -> str:
        line = f"{self.component}.{self.operation}: {self.error_type}: {self.error_message}"
        if self.additional_data:
            line += f" | data={self.additional_data}"
        return line


@dataclass
class ErrorHandler:
    """Records errors raised inside one component together with their context."""

    component: str
    error_log: Dict[str, ErrorContext] = field(default_factory=dict)

    def handle_error(
        self,
        error: BaseException,
        operation: str,
        severity: ErrorSeverity = ErrorSeverity.ERROR,
        additional_data: Optional[Dict[str, Any]] = None,
    ) -> ErrorContext:
        trace: Optional[str] = None
        if error.__traceback__ is not None:
            trace = "".join(traceback.format_exception(type(error), error, error.__traceback__))
        context = ErrorContext(
            timestamp=datetime.now(),
            component=self.component,
            operation=operation,
            severity=severity,
            error_type=type(error).__name__,
            error_message=str(error),
            stack_trace=trace,
            additional_data=additional_data,
            error_class=type(error),
        )
        self.error_log[f"{self.component}_{operation}_{len(self.error_log)}"] = context
        getattr(logger, severity.value)(context.summary())
        if trace:
            logger.debug(f"Stack trace:\n{trace}")
        return context

    def get_error_history(self) -> Dict[str, ErrorContext]:
        return self.error_log

    def errors_of(self, error_type: type) -> List[ErrorContext]:
        """Recorded contexts whose error is ``error_type`` or a subclass of it."""
        return [context for context in self.error_log.values() if issubclass(context.error_class, error_type)]

    def clear_error_history(self) -> None:
        self.error_log.clear()


def exit_code_for(error: BaseException) -> int:
    """Maps an exception onto the command-line exit code contract."""
    return 2 if isinstance(error, USAGE_ERRORS) else 1
