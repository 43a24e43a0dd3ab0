"""Command-line entry point: ``lawbench <command> [options]``."""

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

from dotenv import load_dotenv
from loguru import logger
from pydantic import ValidationError

from . import set_stderr_level
from .config import ExperimentConfig, OutputFormat
from .engine import (
    combine,
    complexity_witness,
    find_spotless_tuple,
    lawlessness_growth,
    mif_growth,
    torsion_growth,
)
from .error_handler import (
    BudgetExceeded,
    ConfigurationError,
    ErrorHandler,
    ErrorSeverity,
    exit_code_for,
)
from .groups import make_backend
from .monitoring import write_metrics
from .reporting import Report, ReportWriter
from .words import enumerate_reduced, format_word, parse_word

# Load environment variables
load_dotenv()

error_handler = ErrorHandler("cli")


def _require(value: Optional[int], flag: str) -> int:
    if value is None:
        raise ConfigurationError(f"{flag} is required for this command")
    return value


def _words(config: ExperimentConfig) -> List:
    texts = config.load_words()
    return [parse_word(text, config.rank) for text in texts]


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_growth(config: ExperimentConfig, report: Report) -> None:
    backend = make_backend(config.group)
    n = _require(config.n, "--n")
    if config.table == "torsion":
        table = torsion_growth(backend, n)
    elif config.table == "mixed":
        table = mif_growth(backend, n, config.budget)
    elif config.table == "lawlessness":
        words = _words(config) or None
        table = lawlessness_growth(backend, n, config.budget, words=words, rank=config.rank)
    else:
        raise ConfigurationError(f"unknown table {config.table!r}; expected lawlessness, torsion or mixed")
    report.data = table.to_dict()
    report.data["rows"] = table.to_rows()
    report.add_claim(f"{table.name}_table", True, "exact" if table.exact else "lower-bound", values=table.values())


def cmd_complexity(config: ExperimentConfig, report: Report) -> None:
    backend = make_backend(config.group)
    rows = []
    for w in _words(config):
        try:
            witness = complexity_witness(backend, w, config.budget)
            rows.append({
                "word": format_word(w),
                "value": witness.value,
                "status": "exact",
                "witness": [backend.format(g) for g in witness.elements],
            })
        except BudgetExceeded:
            rows.append({"word": format_word(w), "value": config.budget + 1, "status": "budget-exceeded", "witness": None})
    if not rows:
        raise ConfigurationError("complexity needs --words or --words-file")
    report.data = {"group": config.group, "budget": config.budget, "rows": rows}
    for row in rows:
        report.add_claim(f"complexity {row['word']}", True, row["status"])


def cmd_witness(config: ExperimentConfig, report: Report) -> None:
    backend = make_backend(config.group)
    l = _require(config.l, "--l")
    entries = find_spotless_tuple(backend, l, config.rank, config.budget)
    report.data = {
        "group": config.group,
        "l": l,
        "total_length": sum(entry.length for entry in entries),
        "tuple": [backend.format(entry.element) for entry in entries],
        "words": [list(entry.word) for entry in entries],
    }
    report.add_claim("spotless_tuple", True, total_length=report.data["total_length"])


def cmd_combine(config: ExperimentConfig, report: Report) -> None:
    words = _words(config)
    combined = combine(words)
    m = len(words)
    bound = 16 * m * m * max(len(w) for w in words)
    report.data = {"words": [format_word(w) for w in words], "combined": format_word(combined), "length": len(combined), "bound": bound}
    report.add_claim("combined_length_bound", len(combined) <= bound, length=len(combined), bound=bound)


def cmd_wreath_law(config: ExperimentConfig, report: Report) -> None:
    from .wreath import WreathBackend, law_witness, shortest_law

    n = _require(config.n, "--n")
    if config.max_len is not None:
        law = shortest_law(n, config.max_len, config.rank, seed=config.seed)
        report.data = {"n": n, "law": format_word(law), "length": len(law)}
        report.add_claim("shortest_law", True, length=len(law))
        return
    backend = WreathBackend(n)
    words = _words(config) or list(enumerate_reduced(config.rank, n + 1))
    rows = [law_witness(w, n).to_dict(backend) for w in words]
    worst = max(sum(row["lengths"]) for row in rows)
    report.data = {"n": n, "witnesses": rows, "worst_total_length": worst}
    report.add_claim("witness_lengths", worst <= (n + 1) ** 2, worst=worst, bound=(n + 1) ** 2)


def cmd_grig(config: ExperimentConfig, report: Report) -> None:
    from . import grigorchuk

    if config.action == "torsion":
        table = grigorchuk.torsion_growth(_require(config.n, "--n"))
        report.data = table.to_dict()
        report.data["rows"] = table.to_rows()
        report.add_claim("orders_are_powers_of_two", True, "exact" if table.exact else "lower-bound", values=table.values())
    elif config.action == "phi":
        certificate = grigorchuk.Phi(_require(config.n, "--n")).certify(seed=config.seed)
        report.data = {
            "n": certificate.n,
            "image_lengths": certificate.image_lengths,
            "injective_checked": certificate.injective_checked,
            "homomorphism_pairs": certificate.homomorphism_pairs,
        }
        report.add_claim("phi_injective_homomorphism", certificate.passed)
    elif config.action == "power":
        table = grigorchuk.lower_bound_table(_require(config.m, "--m"), config.budget)
        report.data = table.to_dict()
        report.data["rows"] = table.to_rows()
        report.add_claim("power_lower_bounds", True, "exact" if table.exact else "lower-bound", values=table.values())
    else:
        raise ConfigurationError(f"unknown grig action {config.action!r}; expected torsion, phi or power")


def cmd_thompson(config: ExperimentConfig, report: Report) -> None:
    from .thompson import brin_squier_check, check_recursion, is_member, length_bounds, make_Un, make_Vn

    n = _require(config.n, "--n")
    recursion = all(check_recursion(j) for j in range(0, n + 1))
    members = all(is_member(make_Un(j)) and is_member(make_Vn(j)) for j in range(0, n + 1))
    result = brin_squier_check(n)
    bounds = length_bounds(n)
    report.data = {
        "n": n,
        "U_n": make_Un(n).to_dict(),
        "V_n": make_Vn(n).to_dict(),
        "length_bounds": {"U": bounds.u_bound, "V": bounds.v_bound},
    }
    report.add_claim("recursion", recursion)
    report.add_claim("membership", members)
    report.add_claim("separates_short_words", result.passed, words=result.words_checked)


def _load_schedule(path: Optional[Path]) -> Dict[str, Any]:
    defaults = {"k": 2, "p": 2, "q": "2", "c": "3/5", "tau": "3/4", "depth": 4}
    if path is None:
        return defaults
    if not path.exists():
        raise ConfigurationError(f"schedule file {path} does not exist")
    try:
        loaded = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"schedule file {path} is not valid JSON: {e}")
    return {**defaults, **loaded}


def cmd_gs(config: ExperimentConfig, report: Report) -> None:
    from .golod import build_schedule, gs_verify, least_m0

    if config.action != "verify":
        raise ConfigurationError(f"unknown gs action {config.action!r}; expected verify")
    params = _load_schedule(config.schedule)
    k, p, depth = int(params["k"]), int(params["p"]), int(params["depth"])
    if "degrees" in params:
        certificate = gs_verify(k, params["tau"], params["degrees"])
        report.data = {"certificate": certificate.to_dict()}
    elif "m0" in params:
        schedule, balls = build_schedule(k, p, params["q"], params["c"], int(params["m0"]), depth)
        certificate = gs_verify(k, params["tau"], tail=schedule.tail(depth))
        report.data = {"schedule": schedule.to_dict(), "balls": balls, "certificate": certificate.to_dict()}
    else:
        least = least_m0(k, p, params["q"], params["c"], params["tau"], depth)
        certificate = least.accepted
        report.data = {
            "schedule": least.schedule.to_dict(),
            "certificate": certificate.to_dict(),
            "rejected": least.rejected.to_dict() if least.rejected else None,
        }
    report.add_claim("golod_shafarevich_inequality", certificate.accepted, reason=certificate.reason)


def cmd_slowgrowth(config: ExperimentConfig, report: Report) -> None:
    from .slowgrowth import named_function, verify_slow

    if config.action != "verify":
        raise ConfigurationError(f"unknown slowgrowth action {config.action!r}; expected verify")
    result = verify_slow(named_function(config.function), _require(config.n, "--n"))
    rows = [{"n": c.n, "bound": c.bound, "f": c.f_value, "words": c.words} for c in result.certificates]
    witnesses = [
        {"l": w.l, "degree": w.degree, "verified_length": w.verified_length, "provenance": w.provenance}
        for w in result.witnesses
    ]
    report.data = {"function": config.function, "L": result.L, "rows": rows, "witnesses": witnesses}
    report.add_claim("complexity_below_f", result.passed)
    report.add_claim(
        "witness_pairs_separate_words", True, result.witness_provenance, unverified_l=result.partial_witnesses,
    )


def cmd_rf(config: ExperimentConfig, report: Report) -> None:
    from .rfbounds import law_generator, rf_lower_bound

    if config.action != "bound":
        raise ConfigurationError(f"unknown rf action {config.action!r}; expected bound")
    backend = make_backend(config.group)
    parameter = _require(config.m if config.m is not None else config.l, "--m")
    certificate = rf_lower_bound(backend, parameter, law_generator(config.law_class), config.budget)
    report.data = {"certificate": certificate.to_dict(backend)}
    report.add_claim("rf_lower_bound", True, certificate.provenance, claim=certificate.claim)


def cmd_check_all(config: ExperimentConfig, report: Report) -> None:
    from .orchestrator import ExecutionMode, OrchestratorConfig, AcceptanceOrchestrator

    orchestrator = AcceptanceOrchestrator(OrchestratorConfig(
        mode=ExecutionMode.PARALLEL if config.parallel else ExecutionMode.SEQUENTIAL,
        quick=config.quick,
        seed=config.seed,
        max_concurrent_checks=config.threads,
        checks=config.checks or None,
        include_long=config.include_long,
    ))
    result = orchestrator.run()
    report.claims = result.claims
    report.passed = result.passed
    report.data = result.data


COMMANDS: Dict[str, Callable[[ExperimentConfig, Report], None]] = {
    "growth": cmd_growth,
    "complexity": cmd_complexity,
    "witness": cmd_witness,
    "combine": cmd_combine,
    "wreath-law": cmd_wreath_law,
    "grig": cmd_grig,
    "thompson": cmd_thompson,
    "gs": cmd_gs,
    "slowgrowth": cmd_slowgrowth,
    "rf": cmd_rf,
    "paper-check": cmd_check_all,
    "check-all": cmd_check_all,
}


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--budget", type=int, help="Search budget (maximum total length)")
    parser.add_argument("--rank", type=int, help="Number of word variables")
    parser.add_argument("--words", nargs="*", help="Words such as abAB or 'x1 x2 X1'")
    parser.add_argument("--words-file", type=Path, help="One word per line; # starts a comment")
    parser.add_argument("--format", dest="output_format", choices=[f.value for f in OutputFormat], help="Report format")
    parser.add_argument("--seed", type=int, help="Seed for randomized spot checks")
    parser.add_argument("--out", type=Path, help="Report path (default: report directory)")
    parser.add_argument("--metrics-out", type=Path, help="Write Prometheus metrics here after the run")
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging on stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lawbench", description="Exact computations of laws and lawlessness growth")
    commands = parser.add_subparsers(dest="command", required=True)

    growth = commands.add_parser("growth", help="Lawlessness, torsion or mixed growth table")
    growth.add_argument("--group", help="free2, symN, dihedralN, wreathN, grig or thompson")
    growth.add_argument("--n", type=int, required=True)
    growth.add_argument("--table", choices=["lawlessness", "torsion", "mixed"])

    for name, help_text in (("complexity", "Complexity of given words"), ("combine", "Combine words into one")):
        sub = commands.add_parser(name, help=help_text)
        sub.add_argument("--group")

    witness = commands.add_parser("witness", help="Tuple avoiding every word of length <= l")
    witness.add_argument("--group")
    witness.add_argument("--l", type=int, required=True)

    wreath = commands.add_parser("wreath-law", help="Witnesses or shortest laws in W_n")
    wreath.add_argument("--n", type=int, required=True)
    wreath.add_argument("--max-len", type=int, help="Search for the shortest law up to this length")

    grig = commands.add_parser("grig", help="Grigorchuk group experiments")
    grig.add_argument("action", choices=["torsion", "phi", "power"])
    grig.add_argument("--n", type=int)
    grig.add_argument("--m", type=int)

    thompson = commands.add_parser("thompson", help="Thompson group witnesses")
    thompson.add_argument("action", choices=["check"])
    thompson.add_argument("--n", type=int, required=True)

    gs = commands.add_parser("gs", help="Golod-Shafarevich certificates")
    gs.add_argument("action", choices=["verify"])
    gs.add_argument("--schedule", type=Path, help="JSON with k, p, q, c, tau and optionally m0 or degrees")

    slow = commands.add_parser("slowgrowth", help="Prescribed slow growth")
    slow.add_argument("action", choices=["verify"])
    slow.add_argument("--function", choices=["n", "log", "sqrt"])
    slow.add_argument("--n", type=int, required=True)

    rf = commands.add_parser("rf", help="Residual finiteness lower bounds")
    rf.add_argument("action", choices=["bound"])
    rf.add_argument("--group")
    rf.add_argument("--class", dest="law_class", help="exponent, nilpotent or p<prime>")
    rf.add_argument("--m", type=int)
    rf.add_argument("--l", type=int)

    check = commands.add_parser("paper-check", aliases=["check-all"], help="Run the full acceptance suite")
    check.add_argument("--quick", action="store_true", help="Reduced parameters")
    check.add_argument("--parallel", action="store_true", help="Run checks concurrently")
    check.add_argument("--checks", nargs="*", help="Subset of checks to run")
    check.add_argument("--include-long", action="store_true", help="Also run long certificates")

    # aliases map to the same parser
    for sub in {id(p): p for p in commands.choices.values()}.values():
        _common(sub)
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    """Only options given on the command line reach the model; the rest keep their defaults."""
    values = {key: value for key, value in vars(args).items() if value is not None and value is not False}
    return ExperimentConfig(**values)


def run(config: ExperimentConfig, writer: Optional[ReportWriter] = None) -> int:
    """Runs one command, writes its report and returns the exit code."""
    report = Report(command=config.command if not config.action else f"{config.command} {config.action}", seed=config.seed)
    try:
        COMMANDS[config.command](config, report)
    except Exception as e:
        code = exit_code_for(e)
        severity = ErrorSeverity.ERROR if code == 1 else ErrorSeverity.WARNING
        error_handler.handle_error(e, config.command, severity)
        report.add_claim(config.command, False, "error", error=f"{type(e).__name__}: {e}")
        _write(config, report, writer)
        return code
    _write(config, report, writer)
    return 0 if report.passed else 1


def _write(config: ExperimentConfig, report: Report, writer: Optional[ReportWriter]) -> None:
    writer = writer or ReportWriter()
    name = report.command.replace(" ", "_")
    rows = report.data.get("rows")
    if config.output_format is OutputFormat.CSV and isinstance(rows, list) and rows:
        writer.write(name, rows, OutputFormat.CSV, config.out)
    else:
        writer.write(name, report, OutputFormat.JSON, config.out)
    if config.metrics_out is not None:
        write_metrics(config.metrics_out)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verbose:
        set_stderr_level("DEBUG")
    try:
        config = config_from_args(args)
    except ValidationError as e:
        error_handler.handle_error(e, "parse", ErrorSeverity.WARNING)
        return exit_code_for(e)
    logger.debug(f"Running {config.command} with {config.model_dump(exclude_defaults=True)}")
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
