import pytest
from prometheus_client import REGISTRY

from lawbench.monitoring import (
    monitor,
    count_evaluations,
    write_metrics,
)
from lawbench.utils import MemoryGuard, env_int, thread_cap, memory_budget_mb
from lawbench.error_handler import ConfigurationError, MemoryBudgetExceeded


def _sample(name, labels):
    return REGISTRY.get_sample_value(name, labels) or 0.0


def test_monitor_successful_operation():
    """Test monitoring of successful operation"""
    labels = {"component": "test_component", "operation": "ok"}
    before = _sample("lawbench_operations_total", labels)

    @monitor("test_component", "ok")
    def test_func():
        return "success"

    assert test_func() == "success"
    assert _sample("lawbench_operations_total", labels) == before + 1
    assert _sample("lawbench_active_operations", {"component": "test_component"}) == 0
    assert _sample("lawbench_operation_duration_seconds_count", labels) >= 1


def test_monitor_failed_operation():
    """Test monitoring of failed operation"""
    error_labels = {"component": "test_component", "operation": "fails", "error_type": "ValueError"}
    before = _sample("lawbench_operation_errors_total", error_labels)

    @monitor("test_component", "fails")
    def test_func():
        raise ValueError("Test error")

    with pytest.raises(ValueError):
        test_func()

    assert _sample("lawbench_operation_errors_total", error_labels) == before + 1
    assert _sample("lawbench_active_operations", {"component": "test_component"}) == 0


def test_monitor_preserves_function_metadata():
    @monitor("test_component", "named")
    def documented():
        """Docstring survives."""

    assert documented.__name__ == "documented"
    assert documented.__doc__ == "Docstring survives."


def test_count_evaluations():
    before = _sample("lawbench_word_evaluations_total", {"backend": "unit"})
    count_evaluations("unit", 5)
    count_evaluations("unit", 0)
    assert _sample("lawbench_word_evaluations_total", {"backend": "unit"}) == before + 5


def test_write_metrics(tmp_path):
    count_evaluations("unit", 1)
    path = write_metrics(tmp_path / "metrics" / "run.prom")
    text = path.read_text()
    assert "lawbench_word_evaluations_total" in text


def test_env_int_defaults_and_validation(monkeypatch):
    monkeypatch.delenv("LAWBENCH_SOMETHING", raising=False)
    assert env_int("LAWBENCH_SOMETHING", 7) == 7
    monkeypatch.setenv("LAWBENCH_SOMETHING", "3")
    assert env_int("LAWBENCH_SOMETHING", 7) == 3
    monkeypatch.setenv("LAWBENCH_SOMETHING", "zero")
    with pytest.raises(ConfigurationError):
        env_int("LAWBENCH_SOMETHING", 7)
    monkeypatch.setenv("LAWBENCH_SOMETHING", "0")
    with pytest.raises(ConfigurationError):
        env_int("LAWBENCH_SOMETHING", 7)


def test_thread_cap_and_memory_budget_from_environment():
    # pinned by the autouse fixture
    assert thread_cap() == 2
    assert memory_budget_mb() == 4096


def test_memory_guard_raises_over_budget():
    guard = MemoryGuard(budget_mb=1, interval=2)
    guard.tick()
    with pytest.raises(MemoryBudgetExceeded):
        guard.tick()


def test_memory_guard_within_budget():
    guard = MemoryGuard(budget_mb=10 ** 7)
    guard.check()
    assert guard.used_mb() > 0
