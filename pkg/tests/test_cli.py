import csv
import json
import os
from pathlib import Path

import pytest

from lawbench.cli import build_parser, config_from_args, main


def _read(path):
    return json.loads(Path(path).read_text())


def test_parser_keeps_defaults_out_of_config():
    args = build_parser().parse_args(["growth", "--n", "3"])
    config = config_from_args(args)
    assert config.command == "growth"
    assert config.n == 3
    assert config.group == "free2"
    assert config.budget == 12


def test_growth_json(tmp_path):
    out = tmp_path / "growth.json"
    code = main(["growth", "--group", "free2", "--n", "3", "--budget", "4", "--out", str(out)])

    assert code == 0
    report = _read(out)
    assert report["passed"]
    assert report["command"] == "growth"
    assert [row["n"] for row in report["data"]["rows"]] == [1, 2, 3]
    assert max(row["value"] for row in report["data"]["rows"]) <= 2


def test_growth_csv(tmp_path):
    out = tmp_path / "growth.csv"
    code = main(["growth", "--group", "sym3", "--n", "2", "--format", "csv", "--out", str(out)])

    assert code == 0
    with open(out, newline="") as handle:
        rows = list(csv.DictReader(handle))
    assert [row["n"] for row in rows] == ["1", "2"]
    assert {row["status"] for row in rows} == {"exact"}


def test_complexity_rows(tmp_path):
    out = tmp_path / "complexity.json"
    code = main(["complexity", "--group", "sym3", "--words", "aa", "abAB", "--budget", "6", "--out", str(out)])

    assert code == 0
    rows = {row["word"]: row for row in _read(out)["data"]["rows"]}
    assert rows["abAB"]["status"] == "exact"
    assert rows["abAB"]["witness"] is not None


def test_combine(tmp_path):
    out = tmp_path / "combine.json"
    assert main(["combine", "--words", "ab", "aB", "--out", str(out)]) == 0
    data = _read(out)["data"]
    assert data["length"] <= data["bound"]


def test_slowgrowth_verify(tmp_path):
    out = tmp_path / "slow.json"
    assert main(["slowgrowth", "verify", "--function", "n", "--n", "4", "--out", str(out)]) == 0
    report = _read(out)
    assert report["command"] == "slowgrowth verify"
    assert report["data"]["L"] == [4]


def test_metrics_written(tmp_path):
    metrics = tmp_path / "metrics.prom"
    code = main([
        "combine", "--words", "ab", "--out", str(tmp_path / "r.json"), "--metrics-out", str(metrics),
    ])
    assert code == 0
    assert "lawbench_operations_total" in metrics.read_text()


@pytest.mark.parametrize("argv", [
    ["growth", "--group", "lamplighter", "--n", "3"],
    ["growth", "--n", "3", "--budget", "0"],
    ["complexity", "--group", "free2"],
    ["complexity", "--words", "ab?"],
    ["growth", "--n", "3", "--words-file", "missing.txt"],
])
def test_configuration_errors_exit_2(argv, tmp_path):
    assert main(argv + ["--out", str(tmp_path / "r.json")]) == 2


def test_error_report_lands_in_report_dir():
    assert main(["complexity", "--group", "free2"]) == 2
    report_file = Path(os.environ["LAWBENCH_REPORT_DIR"]) / "complexity.json"
    report = _read(report_file)
    assert not report["passed"]
    assert report["claims"][0]["provenance"] == "error"


def test_budget_exceeded_exits_1(tmp_path):
    out = tmp_path / "rf.json"
    code = main([
        "rf", "bound", "--group", "dihedral4", "--class", "nilpotent", "--m", "2", "--budget", "5", "--out", str(out),
    ])
    assert code == 1
    report = _read(out)
    assert not report["passed"]
    assert "BudgetExceeded" in report["claims"][0]["detail"]["error"]


def test_unknown_subcommand_exits_through_argparse():
    with pytest.raises(SystemExit) as info:
        main(["lamplight"])
    assert info.value.code == 2


@pytest.mark.parametrize("name", ["paper-check", "check-all"])
def test_acceptance_command_names(name):
    args = build_parser().parse_args([name, "--quick", "--checks", "thompson", "--parallel"])
    config = config_from_args(args)
    assert config.command == name
    assert config.quick and config.parallel
    assert config.checks == ["thompson"]


def test_slowgrowth_reports_witness_provenance(tmp_path):
    out = tmp_path / "slow.json"
    assert main(["slowgrowth", "verify", "--function", "n", "--n", "4", "--out", str(out)]) == 0
    claims = {claim["name"]: claim for claim in _read(out)["claims"]}
    assert claims["witness_pairs_separate_words"]["provenance"] == "exact"
    assert claims["witness_pairs_separate_words"]["detail"]["unverified_l"] == []


@pytest.mark.integration
def test_capped_slowgrowth_witness_is_partial(tmp_path):
    out = tmp_path / "slow.json"
    assert main(["slowgrowth", "verify", "--function", "log", "--n", "5", "--out", str(out)]) == 0
    report = _read(out)
    claim = next(c for c in report["claims"] if c["name"] == "witness_pairs_separate_words")
    assert claim["provenance"] == "partial"
    assert claim["detail"]["unverified_l"] == [64]
    assert [w["verified_length"] for w in report["data"]["witnesses"]] == [4, 6]
