import pytest
from pydantic import ValidationError

from lawbench.config import EngineConfig, ExperimentConfig, OutputFormat, report_dir
from lawbench.error_handler import ConfigurationError


def test_experiment_config_defaults():
    config = ExperimentConfig(command="growth")
    assert config.group == "free2"
    assert config.budget == 12
    assert config.rank == 2
    assert config.output_format is OutputFormat.JSON
    assert config.seed == 0
    # LAWBENCH_THREADS is pinned to 2 by the autouse fixture
    assert config.threads == 2


@pytest.mark.parametrize("group", ["free2", "free3", "grig", "dihedral4", "dihedral6", "thompson", "sym3", "wreath4"])
def test_known_groups_accepted(group):
    assert ExperimentConfig(command="growth", group=group).group == group


@pytest.mark.parametrize("group", ["free", "symX", "wreath", "lamplighter"])
def test_unknown_groups_rejected(group):
    with pytest.raises(ValidationError):
        ExperimentConfig(command="growth", group=group)


def test_unknown_fields_rejected():
    with pytest.raises(ValidationError):
        ExperimentConfig(command="growth", colour="blue")


@pytest.mark.parametrize("field, value", [("budget", 0), ("budget", -3), ("n", -1), ("threads", 0)])
def test_budgets_must_be_positive(field, value):
    with pytest.raises(ValidationError):
        ExperimentConfig(command="growth", **{field: value})


def test_output_format_from_string():
    assert ExperimentConfig(command="growth", output_format="csv").output_format is OutputFormat.CSV


def test_load_words_merges_inline_and_file(tmp_path):
    words_file = tmp_path / "words.txt"
    words_file.write_text("# pool\nab\n\naB  # trailing comment\n")
    config = ExperimentConfig(command="complexity", words=["abAB"], words_file=words_file)
    assert config.load_words() == ["abAB", "ab", "aB"]


def test_load_words_missing_file(tmp_path):
    config = ExperimentConfig(command="complexity", words_file=tmp_path / "missing.txt")
    with pytest.raises(ConfigurationError):
        config.load_words()


def test_engine_config_memory_budget():
    assert EngineConfig().resolved_memory_mb() == 4096
    assert EngineConfig(memory_mb=100).resolved_memory_mb() == 100


def test_report_dir_from_environment(tmp_path):
    assert report_dir() == tmp_path / "reports"
