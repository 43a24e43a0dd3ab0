import pytest
from datetime import datetime
from pydantic import ValidationError

from lawbench.config import ExperimentConfig
from lawbench.error_handler import (
    BudgetExceeded,
    CertificateFailure,
    ConfigurationError,
    ErrorContext,
    ErrorHandler,
    ErrorSeverity,
    InvalidGenerator,
    LawbenchError,
    MalformedCycle,
    MalformedWord,
    MemoryBudgetExceeded,
    NotFoundWithin,
    UnresolvedWitness,
    exit_code_for,
)


@pytest.fixture
def handler():
    return ErrorHandler("engine")


def _raised(error):
    try:
        raise error
    except LawbenchError as e:
        return e


@pytest.fixture
def certificate_failure():
    return _raised(CertificateFailure("witness vanished"))


def test_context_fields(handler, certificate_failure):
    context = handler.handle_error(certificate_failure, "complexity", ErrorSeverity.ERROR)

    assert isinstance(context, ErrorContext)
    assert (context.component, context.operation) == ("engine", "complexity")
    assert context.error_type == "CertificateFailure"
    assert context.error_message == "witness vanished"
    assert "CertificateFailure" in context.stack_trace
    assert context.additional_data is None
    assert context.timestamp <= datetime.now()
    assert context.exit_code == 1


def test_context_without_traceback(handler):
    context = handler.handle_error(ConfigurationError("budget must be positive"), "parse")
    assert context.stack_trace is None
    assert context.exit_code == 2


def test_additional_data_reaches_summary(handler, certificate_failure):
    data = {"word": "abAB", "budget": 12}
    context = handler.handle_error(certificate_failure, "complexity", additional_data=data)

    assert context.additional_data == data
    assert "abAB" in context.summary()


def test_severity_selects_logger_method(handler, certificate_failure, mock_logger):
    for severity in ErrorSeverity:
        handler.handle_error(certificate_failure, "ball", severity)

    for method in ("info", "warning", "error", "critical"):
        assert getattr(mock_logger, method).called


def test_history_keys_are_unique(handler, certificate_failure):
    for _ in range(3):
        handler.handle_error(certificate_failure, "ball")

    history = handler.get_error_history()
    assert len(history) == 3
    assert all(isinstance(context, ErrorContext) for context in history.values())

    handler.clear_error_history()
    assert handler.get_error_history() == {}


def test_errors_of_includes_subclasses(handler):
    handler.handle_error(_raised(InvalidGenerator("x3 in F_2")), "parse")
    handler.handle_error(_raised(MalformedWord("ab?")), "parse")
    handler.handle_error(_raised(BudgetExceeded(4)), "complexity")

    assert len(handler.errors_of(MalformedWord)) == 2
    assert len(handler.errors_of(InvalidGenerator)) == 1
    assert len(handler.errors_of(LawbenchError)) == 3


def test_exception_hierarchy():
    assert issubclass(InvalidGenerator, MalformedWord)
    assert issubclass(MalformedWord, ValueError)
    assert issubclass(ConfigurationError, ValueError)
    assert issubclass(NotFoundWithin, LawbenchError)

    budget = BudgetExceeded(12, "complexity")
    assert budget.budget == 12
    assert "12" in str(budget)

    assert NotFoundWithin(5).max_len == 5

    unresolved = UnresolvedWitness(7, 6)
    assert (unresolved.index, unresolved.materialized) == (7, 6)

    assert MemoryBudgetExceeded(3000.0, 2048).budget_mb == 2048


@pytest.mark.parametrize("error, code", [
    (CertificateFailure("bad"), 1),
    (BudgetExceeded(3), 1),
    (ConfigurationError("bad"), 2),
    (MalformedWord("bad"), 2),
    (InvalidGenerator("bad"), 2),
    (MalformedCycle("bad"), 2),
    (RuntimeError("other"), 1),
])
def test_exit_codes(error, code):
    assert exit_code_for(error) == code


def test_validation_error_maps_to_configuration_exit():
    with pytest.raises(ValidationError) as info:
        ExperimentConfig(command="growth", budget=0)
    assert exit_code_for(info.value) == 2


class _BadSchedule(ConfigurationError):
    pass


def test_context_exit_code_follows_subclasses(handler):
    error = _BadSchedule("empty growth table")
    context = handler.handle_error(error, "parse")
    assert context.exit_code == exit_code_for(error) == 2
    assert handler.errors_of(ConfigurationError) == [context]
    assert handler.handle_error(RuntimeError("boom"), "parse").exit_code == 1
