"""Runs the full acceptance suite behind ``lawbench paper-check``."""

import asyncio
import itertools
import random
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional

from dotenv import load_dotenv
from loguru import logger

from .engine import (
    combine,
    complexity,
    lawlessness_growth,
    mif_complexity,
    mif_free_trend,
    mif_free_witness,
    mif_hard_word,
    naive_complexity,
    random_mixed_word,
    saturate,
)
from .error_handler import (
    BudgetExceeded,
    CertificateFailure,
    ConfigurationError,
    ErrorHandler,
    ErrorSeverity,
    LawbenchError,
    NotFoundWithin,
)
from .groups import FreeBackend, SymBackend, order
from .reporting import ClaimStatus, Report
from .utils import thread_cap
from .words import enumerate_reduced, evaluate, format_word, parse_word, random_reduced

# Load environment variables
load_dotenv()


class ExecutionMode(Enum):
    SEQUENTIAL = "sequential"
    PARALLEL = "parallel"


@dataclass
class OrchestratorConfig:
    mode: ExecutionMode = ExecutionMode.SEQUENTIAL
    quick: bool = False
    seed: int = 0
    max_concurrent_checks: int = field(default_factory=thread_cap)
    checks: Optional[List[str]] = None
    include_long: bool = False


@dataclass
class CheckRecord:
    name: str
    claims: List[ClaimStatus]
    duration: float
    error: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(claim.passed for claim in self.claims)


Check = Callable[[OrchestratorConfig], List[ClaimStatus]]


def _claim(name: str, passed: bool, provenance: str = "exact", **detail: Any) -> ClaimStatus:
    return ClaimStatus(name=name, passed=bool(passed), provenance=provenance, detail=detail)


# ---------------------------------------------------------------------------
# Checks
# ---------------------------------------------------------------------------

def check_oracle(config: OrchestratorConfig) -> List[ClaimStatus]:
    from .wreath import WreathBackend

    claims = []
    max_len = 3 if config.quick else 4
    for backend in (SymBackend(3), WreathBackend(1)):
        whole = saturate(backend).elements()
        mismatches = []
        compared = 0
        for w in enumerate_reduced(2, max_len):
            compared += 1
            try:
                value = complexity(backend, w, 12)
            except BudgetExceeded:
                # a law: must vanish on every pair
                if not all(backend.is_identity(evaluate(w, [g, h], backend)) for g in whole for h in whole):
                    mismatches.append(format_word(w))
                continue
            try:
                if naive_complexity(backend, w, value) != value:
                    mismatches.append(format_word(w))
            except BudgetExceeded:
                mismatches.append(format_word(w))
        claims.append(_claim(f"oracle_{backend.name}", not mismatches, words=compared, mismatches=mismatches))
    return claims


def check_bounded(config: OrchestratorConfig) -> List[ClaimStatus]:
    n = 5 if config.quick else 8
    table = lawlessness_growth(FreeBackend(2), n, budget=4)
    return [_claim("free2_growth_bounded_by_2", table.exact and max(table.values()) <= 2, values=table.values())]


def check_wreath(config: OrchestratorConfig) -> List[ClaimStatus]:
    from .wreath import law_witness, shortest_law

    claims = []
    n_max = 2 if config.quick else 4
    for n in range(1, n_max + 1):
        worst = 0
        count = 0
        for w in enumerate_reduced(2, n + 1):
            witness = law_witness(w, n)
            worst = max(worst, witness.total_length)
            count += 1
        claims.append(_claim(f"wreath{n}_witnesses", worst <= (n + 1) ** 2, words=count, worst_total_length=worst, bound=(n + 1) ** 2))
        try:
            shortest_law(n, n + 1)
            claims.append(_claim(f"wreath{n}_no_law_up_to_{n + 1}", False))
        except NotFoundWithin:
            claims.append(_claim(f"wreath{n}_no_law_up_to_{n + 1}", True))
    law = shortest_law(1, 4)
    claims.append(_claim("wreath1_shortest_law", len(law) == 4, law=format_word(law)))
    return claims


COMBINER_POOL = ("a", "ab", "aB", "abAB", "aab", "aabb")


def check_combiner(config: OrchestratorConfig) -> List[ClaimStatus]:
    from .wreath import WreathBackend

    pool = [parse_word(text) for text in COMBINER_POOL]
    groups = [SymBackend(3), WreathBackend(1)]
    pairs = {}
    for backend in groups:
        whole = saturate(backend).elements()
        pairs[backend.name] = list(itertools.product(whole, repeat=2))
    failures = []
    checked = 0
    max_m = 2 if config.quick else 3
    for m in range(1, max_m + 1):
        for subset in itertools.combinations(pool, m):
            combined = combine(subset)
            checked += 1
            if combined.is_trivial() or len(combined) > 16 * m * m * max(len(w) for w in subset):
                failures.append([format_word(w) for w in subset])
                continue
            for backend in groups:
                for g, h in pairs[backend.name]:
                    if any(backend.is_identity(evaluate(w, [g, h], backend)) for w in subset):
                        if not backend.is_identity(evaluate(combined, [g, h], backend)):
                            failures.append([format_word(w) for w in subset])
                            break
    return [_claim("combiner_vanishing_sets", not failures, subsets=checked, failures=failures)]


def check_grigorchuk(config: OrchestratorConfig) -> List[ClaimStatus]:
    from .grigorchuk import Phi, power_complexity, torsion_growth, y_sequence

    claims = []
    n = 4 if config.quick else 6
    table = torsion_growth(n)
    claims.append(_claim("grig_torsion_powers_of_two", table.exact, values=table.values()))
    mismatches = []
    for m in range(0, 3):
        chi = power_complexity(m)
        from_pi = next((j for j, value in enumerate(table.values(), start=1) if value > 2 ** m), None)
        if from_pi is not None and chi != from_pi:
            mismatches.append({"m": m, "chi": chi, "from_torsion": from_pi})
    claims.append(_claim("grig_power_complexity_matches_torsion", not mismatches, mismatches=mismatches))
    sequence = y_sequence()
    y_max = 3 if config.quick else 5
    for j in range(0, y_max + 1):
        sequence.certify(j)
    lengths = [sequence.length(j) for j in range(0, y_max + 1)]
    tight = [c.tight_bound_holds for c in sequence.certificates[2:y_max + 1]]
    claims.append(_claim("grig_y_sequence", all(tight), lengths=lengths, tight_bound_holds=tight))
    certificate = Phi(1).certify()
    claims.append(_claim("grig_phi1_injective_homomorphism", certificate.passed and certificate.injective_checked == 7))
    if config.include_long:
        claims.append(_claim("grig_phi2_injective_homomorphism", Phi(2).certify(seed=config.seed).passed, provenance="sampled"))
    return claims


def check_thompson(config: OrchestratorConfig) -> List[ClaimStatus]:
    from .thompson import A, B, brin_squier_check, check_recursion, is_member, make_Un, make_Vn

    n_max = 3 if config.quick else 5
    recursion = all(check_recursion(n) for n in range(0, n_max + 1))
    maps = [A, B] + [make_Un(n) for n in range(0, n_max + 1)] + [make_Vn(n) for n in range(0, n_max + 1)]
    report = brin_squier_check(3 if config.quick else 4)
    return [
        _claim("thompson_recursion", recursion, n_max=n_max),
        _claim("thompson_membership", all(is_member(f) for f in maps), maps=len(maps)),
        _claim("thompson_pair_separates_words", report.passed, words=report.words_checked),
    ]


def check_golod(config: OrchestratorConfig) -> List[ClaimStatus]:
    from .golod import check_degree_power, least_m0

    rng = random.Random(config.seed)
    samples = 5 if config.quick else 20
    cap = 8 if config.quick else 12
    outcomes = {"true": 0, "false": 0, "undecided": 0}
    for p in (2, 3):
        for _ in range(samples):
            w = random_reduced(2, rng.randint(1, 6), rng)
            result = check_degree_power(w, p, cap)
            outcomes["undecided" if result is None else str(result).lower()] += 1
    least = least_m0(2, 2, 2, "3/5", "3/4")
    rejected = least.rejected is not None and not least.rejected.accepted
    return [
        _claim("golod_degree_of_powers", outcomes["false"] == 0, **outcomes),
        _claim(
            "golod_schedule_least_m0",
            least.accepted.accepted and least.accepted.relation_sum < least.accepted.threshold and rejected,
            m0=least.m0,
            relation_sum=str(least.accepted.relation_sum),
        ),
    ]


def check_slowgrowth(config: OrchestratorConfig) -> List[ClaimStatus]:
    from .slowgrowth import (
        G_HAT,
        H_HAT,
        GammaGroup,
        check_sparse,
        gamma_conjugate,
        gamma_invert,
        gamma_multiply,
        named_function,
        schedule_L,
        sparse_pq,
        verify_slow,
    )

    claims = [_claim("sparse_pair_properties", check_sparse(sparse_pq(12)), N=12)]
    max_index, spread = (4, 3) if config.quick else (6, 8)
    group = GammaGroup(named_function("n"), max_index=max_index)
    rng = random.Random(config.seed)
    window = (-spread, group.pair.q_at(max_index) + spread)
    disagreements = 0
    samples = 50 if config.quick else 200
    for _ in range(samples):
        factors = []
        for _ in range(rng.randint(1, 8)):
            base = G_HAT if rng.random() < 0.5 else H_HAT
            factor = gamma_conjugate(base, rng.randint(-spread, spread))
            factors.append(factor if rng.random() < 0.5 else gamma_invert(factor))
        if rng.random() < 0.5 and len(factors) >= 2:
            u, v = factors[0], factors[1]
            factors = [gamma_invert(u), gamma_invert(v), u, v]
        element = factors[0]
        for factor in factors[1:]:
            element = gamma_multiply(element, factor)
        if group.is_identity_gamma(element) != group.brute_force_identity(element, window):
            disagreements += 1
    claims.append(_claim("gamma_word_problem_matches_brute_force", disagreements == 0, samples=samples))
    log = named_function("log")
    n_max = schedule_L(log, 1)[0] + 2
    report = verify_slow(log, n_max)
    claims.append(_claim(
        "slow_growth_bound",
        report.passed,
        L=report.L,
        bounds=[c.bound for c in report.certificates],
        f=[c.f_value for c in report.certificates],
    ))
    claims.append(_claim(
        "slow_growth_witness_pairs", True, report.witness_provenance, unverified_l=report.partial_witnesses,
    ))
    return claims


def check_mixed(config: OrchestratorConfig) -> List[ClaimStatus]:
    backend = FreeBackend(2)
    claims = []
    l_max = 1 if config.quick else 2
    for l in range(1, l_max + 1):
        mw = mif_hard_word(backend, l)
        try:
            value = mif_complexity(backend, mw, l + 1)
            claims.append(_claim(f"mixed_hard_word_{l}", value >= l + 1, complexity=value, length=mw.length()))
        except BudgetExceeded:
            claims.append(_claim(f"mixed_hard_word_{l}", True, provenance="budget-exceeded", length=mw.length()))
    rng = random.Random(config.seed)
    samples = 10 if config.quick else 50
    for _ in range(samples):
        mif_free_witness(random_mixed_word(backend, rng.randint(1, 12), rng), backend)
    claims.append(_claim("mixed_free_witnesses", True, samples=samples))
    lengths = [5, 10] if config.quick else [5, 10, 15, 20, 25, 30]
    trend = mif_free_trend(backend, lengths, samples=5, seed=config.seed)
    claims.append(_claim(
        "mixed_free_trend",
        True,
        provenance="reported",
        values=trend.values(),
        constant_n_log_n=trend.metadata["constant_n_log_n"],
    ))
    return claims


def check_rf(config: OrchestratorConfig) -> List[ClaimStatus]:
    from .grigorchuk import GrigorchukBackend
    from .rfbounds import p_group_laws, rf_lower_bound

    backend = GrigorchukBackend()
    claims = []
    for m in range(1, 4):
        certificate = rf_lower_bound(backend, m, p_group_laws(2))
        recomputed = evaluate(certificate.law, certificate.witness, backend)
        survives = not backend.is_identity(recomputed) and backend.equal(recomputed, certificate.element)
        g_order = order(certificate.witness[0], backend, two_group=True)
        claims.append(_claim(
            f"rf_grig_p2_{m}",
            survives and g_order > 2 ** m,
            provenance=certificate.provenance,
            claim=certificate.claim,
            witness_order=g_order,
        ))
    return claims


DEFAULT_CHECKS: Dict[str, Check] = {
    "oracle": check_oracle,
    "bounded": check_bounded,
    "wreath": check_wreath,
    "combiner": check_combiner,
    "grigorchuk": check_grigorchuk,
    "thompson": check_thompson,
    "golod": check_golod,
    "slowgrowth": check_slowgrowth,
    "mixed": check_mixed,
    "rf": check_rf,
}


# ---------------------------------------------------------------------------
# Orchestrator
# ---------------------------------------------------------------------------

class AcceptanceOrchestrator:
    def __init__(self, config: Optional[OrchestratorConfig] = None, checks: Optional[Dict[str, Check]] = None):
        self.config = config or OrchestratorConfig()
        self.checks: Dict[str, Check] = dict(checks if checks is not None else DEFAULT_CHECKS)
        self.execution_history: List[CheckRecord] = []
        self.error_handler = ErrorHandler("orchestrator")

    def register(self, name: str, check: Check) -> None:
        self.checks[name] = check

    def selected(self) -> List[str]:
        if not self.config.checks:
            return list(self.checks)
        unknown = [name for name in self.config.checks if name not in self.checks]
        if unknown:
            raise ConfigurationError(f"unknown checks: {', '.join(unknown)}")
        return list(self.config.checks)

    def run_check(self, name: str) -> CheckRecord:
        """Runs one check; errors become a failed claim, never an exception."""
        start = time.time()
        logger.info(f"Running check {name}")
        try:
            claims = self.checks[name](self.config)
            record = CheckRecord(name, claims, time.time() - start)
        except BudgetExceeded as e:
            self.error_handler.handle_error(e, name, ErrorSeverity.WARNING)
            record = CheckRecord(name, [_claim(name, False, "budget-exceeded", error=str(e))], time.time() - start, str(e))
        except CertificateFailure as e:
            self.error_handler.handle_error(e, name, ErrorSeverity.ERROR)
            record = CheckRecord(name, [_claim(name, False, error=str(e))], time.time() - start, str(e))
        except LawbenchError as e:
            self.error_handler.handle_error(e, name, ErrorSeverity.ERROR)
            record = CheckRecord(name, [_claim(name, False, "error", error=str(e))], time.time() - start, str(e))
        except Exception as e:
            context = self.error_handler.handle_error(e, name, ErrorSeverity.CRITICAL, {"check": name})
            message = f"{context.error_type}: {context.error_message}"
            record = CheckRecord(name, [_claim(name, False, "error", error=message)], time.time() - start, message)
        self.execution_history.append(record)
        status = "passed" if record.passed else "FAILED"
        logger.info(f"Check {name} {status} in {record.duration:.1f}s")
        return record

    async def run_parallel(self, names: List[str]) -> List[CheckRecord]:
        semaphore = asyncio.Semaphore(max(1, self.config.max_concurrent_checks))

        async def guarded(name: str) -> CheckRecord:
            async with semaphore:
                return await asyncio.to_thread(self.run_check, name)

        return list(await asyncio.gather(*(guarded(name) for name in names)))

    def _report(self, records: List[CheckRecord]) -> Report:
        report = Report(command="paper-check", seed=self.config.seed)
        by_name = {record.name: record for record in records}
        for name in self.selected():
            for claim in by_name[name].claims:
                report.claims.append(claim)
                report.passed = report.passed and claim.passed
        report.data = {"quick": self.config.quick, "mode": self.config.mode.value, "checks": self.selected()}
        return report

    async def run_async(self) -> Report:
        names = self.selected()
        if self.config.mode is ExecutionMode.PARALLEL:
            records = await self.run_parallel(names)
        else:
            records = [self.run_check(name) for name in names]
        return self._report(records)

    def run(self) -> Report:
        names = self.selected()
        if self.config.mode is ExecutionMode.PARALLEL:
            return asyncio.run(self.run_async())
        return self._report([self.run_check(name) for name in names])

    def get_execution_status(self) -> Dict[str, Any]:
        return {
            "total_checks": len(self.execution_history),
            "failed": [record.name for record in self.execution_history if not record.passed],
            "durations": {record.name: round(record.duration, 3) for record in self.execution_history},
        }
