import pytest
from unittest.mock import Mock

from lawbench.error_handler import BudgetExceeded, CertificateFailure, ConfigurationError
from lawbench.orchestrator import (
    DEFAULT_CHECKS,
    AcceptanceOrchestrator,
    ExecutionMode,
    OrchestratorConfig,
    check_bounded,
    check_thompson,
)
from lawbench.reporting import ClaimStatus


def _passing(name):
    return Mock(return_value=[ClaimStatus(name=name, passed=True)])


@pytest.fixture
def config():
    return OrchestratorConfig(mode=ExecutionMode.SEQUENTIAL, quick=True, seed=3, max_concurrent_checks=2)


@pytest.fixture
def stub_checks():
    return {
        "first": _passing("first_claim"),
        "second": _passing("second_claim"),
        "third": _passing("third_claim"),
    }


@pytest.fixture
def orchestrator(config, stub_checks):
    """Create an orchestrator with stubbed checks"""
    return AcceptanceOrchestrator(config, checks=stub_checks)


def test_orchestrator_initialization(config):
    """Test orchestrator initialization"""
    orchestrator = AcceptanceOrchestrator(config)
    assert orchestrator.config == config
    assert set(orchestrator.checks) == set(DEFAULT_CHECKS)
    assert orchestrator.error_handler is not None
    assert orchestrator.execution_history == []


def test_sequential_execution(orchestrator, stub_checks, config):
    """Test sequential run over every registered check"""
    report = orchestrator.run()

    assert report.passed
    assert report.command == "paper-check"
    assert [claim.name for claim in report.claims] == ["first_claim", "second_claim", "third_claim"]
    for check in stub_checks.values():
        check.assert_called_once_with(config)


@pytest.mark.asyncio
async def test_parallel_execution(orchestrator, config):
    """Test parallel run keeps the registration order in the report"""
    config.mode = ExecutionMode.PARALLEL

    report = await orchestrator.run_async()

    assert report.passed
    assert report.data["mode"] == "parallel"
    assert [claim.name for claim in report.claims] == ["first_claim", "second_claim", "third_claim"]
    assert len(orchestrator.execution_history) == 3


def test_parallel_run_from_sync_entry(orchestrator, config):
    config.mode = ExecutionMode.PARALLEL
    assert orchestrator.run().passed


def test_selected_subset(orchestrator, config, stub_checks):
    config.checks = ["second"]
    report = orchestrator.run()

    assert [claim.name for claim in report.claims] == ["second_claim"]
    assert not stub_checks["first"].called


def test_unknown_check(orchestrator, config):
    config.checks = ["second", "missing"]
    with pytest.raises(ConfigurationError):
        orchestrator.run()


@pytest.mark.parametrize("error, provenance", [
    (BudgetExceeded(4), "budget-exceeded"),
    (CertificateFailure("witness vanished"), "exact"),
    (ConfigurationError("bad schedule"), "error"),
    (RuntimeError("unexpected"), "error"),
    (KeyError("missing"), "error"),
])
def test_errors_become_failed_claims(orchestrator, error, provenance):
    """Test that a raising check fails its claim without stopping the run"""
    orchestrator.register("broken", Mock(side_effect=error))

    report = orchestrator.run()

    assert not report.passed
    failed = [claim for claim in report.claims if not claim.passed]
    assert len(failed) == 1
    assert failed[0].name == "broken"
    assert failed[0].provenance == provenance
    assert len(orchestrator.execution_history) == 4


@pytest.mark.asyncio
async def test_unexpected_error_does_not_abort_parallel_run(orchestrator, config):
    config.mode = ExecutionMode.PARALLEL
    orchestrator.register("broken", Mock(side_effect=RuntimeError("index out of range")))

    report = await orchestrator.run_async()

    assert not report.passed
    assert [claim.name for claim in report.claims if claim.passed] == ["first_claim", "second_claim", "third_claim"]
    broken = report.claims[-1]
    assert broken.provenance == "error"
    assert broken.detail["error"] == "RuntimeError: index out of range"
    assert orchestrator.error_handler.errors_of(RuntimeError)[0].severity.value == "critical"


def test_execution_status(orchestrator):
    """Test execution status after a run with one failure"""
    orchestrator.register("broken", Mock(side_effect=CertificateFailure("bad")))
    orchestrator.run()

    status = orchestrator.get_execution_status()
    assert status["total_checks"] == 4
    assert status["failed"] == ["broken"]
    assert set(status["durations"]) == {"first", "second", "third", "broken"}


def test_check_bounded_quick(config):
    claims = check_bounded(config)
    assert len(claims) == 1
    assert claims[0].passed
    assert max(claims[0].detail["values"]) <= 2


@pytest.mark.integration
def test_check_thompson_quick(config):
    claims = check_thompson(config)
    assert [claim.name for claim in claims] == [
        "thompson_recursion",
        "thompson_membership",
        "thompson_pair_separates_words",
    ]
    assert all(claim.passed for claim in claims)


@pytest.mark.slow
def test_quick_suite_passes():
    report = AcceptanceOrchestrator(OrchestratorConfig(quick=True)).run()
    failed = [claim.name for claim in report.claims if not claim.passed]
    assert failed == []
