"""Ball enumeration, word complexity, growth tables, spotless tuples, the
word combiner and the mixed-identity constructions."""

import csv
import io
import itertools
import json
import math
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Hashable, Iterator, List, Optional, Sequence, Tuple

from loguru import logger

from .config import EngineConfig, EntryStatus
from .error_handler import (
    BudgetExceeded,
    CertificateFailure,
    ConfigurationError,
    LengthBoundViolated,
    MalformedWord,
    MemoryBudgetExceeded,
    NotFound,
)
from .groups import FreeBackend, GroupBackend, order as element_order
from .monitoring import count_evaluations, monitor
from .utils import MemoryGuard
from .words import (
    FreeWord,
    MixedWord,
    commutator,
    conjugate,
    cyclic_normal_form,
    enumerate_reduced,
    evaluate,
    format_word,
    free_root,
    identity_word,
    is_cyclically_reduced,
    mixed_commutator_with_variable,
    random_reduced,
    substitute_free,
    substitute_mixed,
)


# ---------------------------------------------------------------------------
# Balls
# ---------------------------------------------------------------------------

@dataclass
class BallEntry:
    element: Any
    length: int
    word: Tuple[int, ...]
    parent: Optional[int] = None
    step: Optional[int] = None


class Ball:
    """The ball B_S(r), grown breadth first and stored by length."""

    def __init__(self, backend: GroupBackend, guard: Optional[MemoryGuard] = None, max_size: Optional[int] = None):
        self.backend = backend
        self.guard = guard or MemoryGuard()
        self.max_size = max_size or EngineConfig().max_ball_size
        self.entries: List[BallEntry] = [BallEntry(backend.identity(), 0, ())]
        self.strata: List[List[int]] = [[0]]
        self._index: Dict[Hashable, int] = {}
        self._keyed = backend.has_canonical_keys
        if self._keyed:
            self._index[backend.canonical_key(self.entries[0].element)] = 0
        self.saturated = False
        self._steps: List[int] = []
        for i, involution in enumerate(backend.involutions, start=1):
            self._steps.append(i)
            if not involution:
                self._steps.append(-i)

    @property
    def radius(self) -> int:
        return len(self.strata) - 1

    def __len__(self) -> int:
        return len(self.entries)

    def elements(self) -> List[Any]:
        return [entry.element for entry in self.entries]

    def stratum(self, length: int) -> List[BallEntry]:
        if length > self.radius:
            self.grow_to(length)
        if length > self.radius:
            return []
        return [self.entries[i] for i in self.strata[length]]

    def upto(self, length: int) -> List[BallEntry]:
        self.grow_to(length)
        return [self.entries[i] for j in range(0, min(length, self.radius) + 1) for i in self.strata[j]]

    def find(self, g: Any) -> Optional[BallEntry]:
        if self._keyed:
            index = self._index.get(self.backend.canonical_key(g))
            return None if index is None else self.entries[index]
        for entry in self.entries:
            if self.backend.equal(entry.element, g):
                return entry
        return None

    def length_of(self, g: Any) -> Optional[int]:
        entry = self.find(g)
        return None if entry is None else entry.length

    def grow_to(self, radius: int) -> "Ball":
        try:
            while self.radius < radius and not self.saturated:
                self._grow_one()
        except MemoryBudgetExceeded:
            logger.error(f"Discarding partial ball of {len(self.entries)} elements in {self.backend.name}")
            self.entries = self.entries[:1]
            self.strata = [[0]]
            self._index = {k: v for k, v in self._index.items() if v == 0}
            self.saturated = False
            raise
        return self

    def _grow_one(self) -> None:
        backend = self.backend
        new_level: List[int] = []
        length = self.radius + 1
        for parent in self.strata[-1]:
            entry = self.entries[parent]
            for step in self._steps:
                h = backend.multiply(entry.element, backend.step(step))
                if self._keyed:
                    key = backend.canonical_key(h)
                    if key in self._index:
                        continue
                    self._index[key] = len(self.entries)
                elif any(backend.equal(other.element, h) for other in self.entries):
                    continue
                new_level.append(len(self.entries))
                self.entries.append(BallEntry(h, length, entry.word + (step,), parent, step))
                self.guard.tick()
                if len(self.entries) > self.max_size:
                    raise BudgetExceeded(self.max_size, f"ball in {backend.name}")
        if new_level:
            self.strata.append(new_level)
            logger.debug(f"Ball in {backend.name}: radius {length}, {len(self.entries)} elements")
        else:
            self.saturated = True

    def certify(self) -> bool:
        """Re-multiplies every element's BFS parent by its step."""
        backend = self.backend
        for entry in self.entries[1:]:
            parent = self.entries[entry.parent]
            if parent.length + 1 != entry.length:
                raise CertificateFailure(f"ball entry {entry.word} has a non-adjacent parent")
            if not backend.equal(backend.multiply(parent.element, backend.step(entry.step)), entry.element):
                raise CertificateFailure(f"ball entry {entry.word} is not its parent times its step")
        return True


def ball(backend: GroupBackend, r: int, guard: Optional[MemoryGuard] = None) -> Ball:
    if r < 0:
        raise ConfigurationError(f"ball radius must be >= 0, got {r}")
    return Ball(backend, guard).grow_to(r)


def saturate(backend: GroupBackend, max_size: int = 100_000) -> Ball:
    """The whole (finite) group as a ball."""
    result = Ball(backend, max_size=max_size)
    while not result.saturated:
        result._grow_one()
    return result


# ---------------------------------------------------------------------------
# Growth tables
# ---------------------------------------------------------------------------

@dataclass
class GrowthEntry:
    n: int
    value: int
    status: EntryStatus = EntryStatus.EXACT


@dataclass
class GrowthTable:
    name: str
    group: str
    entries: List[GrowthEntry] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def add(self, n: int, value: int, status: EntryStatus = EntryStatus.EXACT) -> GrowthEntry:
        entry = GrowthEntry(n, value, status)
        self.entries.append(entry)
        return entry

    def value(self, n: int) -> int:
        for entry in self.entries:
            if entry.n == n:
                return entry.value
        raise KeyError(n)

    def values(self) -> List[int]:
        return [entry.value for entry in self.entries]

    @property
    def exact(self) -> bool:
        return all(entry.status is EntryStatus.EXACT for entry in self.entries)

    def is_nondecreasing(self) -> bool:
        values = self.values()
        return all(a <= b for a, b in zip(values, values[1:]))

    def to_rows(self) -> List[Dict[str, Any]]:
        return [{"n": e.n, "value": e.value, "status": e.status.value} for e in self.entries]

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=["n", "value", "status"], lineterminator="\n")
        writer.writeheader()
        writer.writerows(self.to_rows())
        return buffer.getvalue()

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "group": self.group, "entries": self.to_rows(), "metadata": self.metadata}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, default=str) + "\n"


def measured_constant(table: GrowthTable, model: Callable[[int], float]) -> float:
    """Least C with value <= C * model(n) over every entry where model(n) > 0."""
    ratios = [entry.value / model(entry.n) for entry in table.entries if model(entry.n) > 0]
    return max(ratios) if ratios else 0.0


# ---------------------------------------------------------------------------
# Complexity
# ---------------------------------------------------------------------------

def compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """Weak compositions of ``total`` into ``parts`` parts, first part ascending."""
    if parts == 1:
        yield (total,)
        return
    for first in range(0, total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def _tuples_of_total(the_ball: Ball, total: int, k: int) -> Iterator[Tuple[BallEntry, ...]]:
    for composition in compositions(total, k):
        strata = [the_ball.stratum(part) for part in composition]
        if any(not stratum for stratum in strata):
            continue
        yield from itertools.product(*strata)


@dataclass
class ComplexityWitness:
    value: int
    entries: Tuple[BallEntry, ...]

    @property
    def elements(self) -> Tuple[Any, ...]:
        return tuple(entry.element for entry in self.entries)

    @property
    def words(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(entry.word for entry in self.entries)


@monitor("engine", "complexity")
def complexity_witness(
    backend: GroupBackend, w: FreeWord, budget: int, the_ball: Optional[Ball] = None
) -> ComplexityWitness:
    """Least total length of a tuple on which w does not vanish.

    BudgetExceeded means the complexity exceeds ``budget`` or w is a law.
    """
    if w.is_trivial():
        raise MalformedWord("complexity is only defined for nontrivial words")
    the_ball = the_ball or Ball(backend)
    k = w.rank
    evaluations = 0
    try:
        for total in range(1, budget + 1):
            the_ball.grow_to(total)
            if the_ball.saturated and total > k * the_ball.radius:
                break
            for entries in _tuples_of_total(the_ball, total, k):
                evaluations += 1
                value = evaluate(w, [entry.element for entry in entries], backend)
                if not backend.is_identity(value):
                    return ComplexityWitness(total, entries)
    finally:
        count_evaluations(backend.name, evaluations)
    raise BudgetExceeded(budget, f"complexity of {format_word(w)} in {backend.name}")


def complexity(backend: GroupBackend, w: FreeWord, budget: int, the_ball: Optional[Ball] = None) -> int:
    return complexity_witness(backend, w, budget, the_ball).value


def naive_complexity(backend: GroupBackend, w: FreeWord, budget: int) -> int:
    """Reference complexity by nested loops over generator words, no ball.

    The least total word length over tuples of words equals the least total
    S-length over tuples of elements.
    """
    def words_of_length(n: int) -> List[FreeWord]:
        if n == 0:
            return [FreeWord((), backend.rank)]
        return list(enumerate_reduced(backend.rank, n, exact=True))

    for total in range(1, budget + 1):
        for composition in compositions(total, w.rank):
            for words in itertools.product(*[words_of_length(part) for part in composition]):
                elements = [backend.from_word(u) for u in words]
                if not backend.is_identity(evaluate(w, elements, backend)):
                    return total
    raise BudgetExceeded(budget, f"naive complexity of {format_word(w)} in {backend.name}")


@monitor("engine", "lawlessness_growth")
def lawlessness_growth(
    backend: GroupBackend,
    n: int,
    budget: int,
    words: Optional[Sequence[FreeWord]] = None,
    rank: int = 2,
) -> GrowthTable:
    """A(m) for m = 1..n, optionally over a restricted word set."""
    if n < 1:
        raise ConfigurationError(f"growth table needs n >= 1, got {n}")
    table = GrowthTable("lawlessness", backend.name, metadata={"budget": budget, "rank": rank})
    the_ball = Ball(backend)
    current, status = 0, EntryStatus.EXACT
    for m in range(1, n + 1):
        if words is None:
            candidates = enumerate_reduced(rank, m, exact=True)
        else:
            candidates = (w for w in words if len(w) == m)
        for w in candidates:
            try:
                value = complexity(backend, w, budget, the_ball)
            except BudgetExceeded:
                logger.debug(f"Complexity of {format_word(w)} exceeds {budget} in {backend.name}")
                current, status = budget + 1, EntryStatus.LOWER_BOUND
                continue
            current = max(current, value)
        table.add(m, current, status)
    logger.info(f"Lawlessness growth for {backend.name}: {table.values()}")
    return table


@monitor("engine", "torsion_growth")
def torsion_growth(backend: GroupBackend, n: int, budget: int = 10_000, two_group: bool = False) -> GrowthTable:
    """pi(j) = max order of an element of length <= j, for j = 1..n."""
    table = GrowthTable("torsion", backend.name, metadata={"budget": budget})
    the_ball = ball(backend, n)
    current, status = 1, EntryStatus.EXACT
    orders: Dict[int, List[int]] = {}
    for j in range(1, n + 1):
        for entry in the_ball.stratum(j):
            try:
                o = element_order(entry.element, backend, budget, two_group)
            except BudgetExceeded:
                current, status = max(current, budget + 1), EntryStatus.LOWER_BOUND
                continue
            orders.setdefault(j, []).append(o)
            current = max(current, o)
        table.add(j, current, status)
    table.metadata["orders"] = {j: sorted(set(values)) for j, values in orders.items()}
    return table


# ---------------------------------------------------------------------------
# Spotless tuples
# ---------------------------------------------------------------------------

def vanishing_free(elements: Sequence[Any], backend: GroupBackend, l: int) -> bool:
    """True if some nontrivial reduced word of length <= l vanishes on ``elements``."""
    k = len(elements)
    alphabet: List[Tuple[int, Any]] = []
    for i, g in enumerate(elements, start=1):
        alphabet.append((i, g))
        alphabet.append((-i, backend.invert(g)))

    def search(product: Any, last: int, depth: int) -> bool:
        for letter, g in alphabet:
            if letter == -last:
                continue
            h = backend.multiply(product, g)
            if backend.is_identity(h):
                return True
            if depth + 1 < l and search(h, letter, depth + 1):
                return True
        return False

    if k == 0 or l < 1:
        return False
    return search(backend.identity(), 0, 0)


@monitor("engine", "find_spotless_tuple")
def find_spotless_tuple(backend: GroupBackend, l: int, k: int = 2, budget: int = 12) -> Tuple[BallEntry, ...]:
    """A k-tuple of least total length on which no nontrivial word of length <= l vanishes."""
    the_ball = Ball(backend)
    for total in range(0, budget + 1):
        the_ball.grow_to(total)
        if the_ball.saturated and total > k * the_ball.radius:
            break
        for entries in _tuples_of_total(the_ball, total, k):
            if not vanishing_free([entry.element for entry in entries], backend, l):
                logger.info(f"Spotless tuple for l={l} in {backend.name} at total length {total}")
                return entries
    raise NotFound(f"no {k}-tuple of total length <= {budget} in {backend.name} avoids every word of length <= {l}")


# ---------------------------------------------------------------------------
# Word combiner
# ---------------------------------------------------------------------------

def _short_conjugators(rank: int) -> List[FreeWord]:
    return [identity_word(rank)] + list(enumerate_reduced(rank, 2))


def _combine_pair(u: FreeWord, v: FreeWord, conjugators: Sequence[FreeWord]) -> FreeWord:
    for c in conjugators:
        uc = conjugate(u, c)
        for d in conjugators:
            w = commutator(uc, conjugate(v, d))
            if not w.is_trivial():
                return w
    raise LengthBoundViolated(f"no short conjugators separate {format_word(u)} and {format_word(v)}")


@monitor("engine", "combine")
def combine(words: Sequence[FreeWord]) -> FreeWord:
    """A nontrivial word vanishing wherever any of ``words`` vanishes.

    Pairs are merged as [u^c, v^d] over a balanced tree; the result has
    length at most 16 m^2 max|w_i|.
    """
    if not words:
        raise ConfigurationError("combine needs at least one word")
    if any(w.is_trivial() for w in words):
        raise MalformedWord("combine needs nontrivial words")
    rank = max(w.rank for w in words)
    m = len(words)
    if rank == 1 and m > 1:
        raise ConfigurationError("words of rank 1 commute; combining needs rank >= 2")
    level = [w.with_rank(rank) for w in words]
    conjugators = _short_conjugators(rank)
    while len(level) > 1:
        merged = [_combine_pair(level[i], level[i + 1], conjugators) for i in range(0, len(level) - 1, 2)]
        if len(level) % 2:
            merged.append(level[-1])
        level = merged
    result = level[0]
    bound = 16 * m * m * max(len(w) for w in words)
    if len(result) > bound:
        raise LengthBoundViolated(f"combined word has length {len(result)} > {bound}")
    return result


# ---------------------------------------------------------------------------
# Consistency checks
# ---------------------------------------------------------------------------

@dataclass
class QuotientRow:
    word: str
    chi_group: Optional[int]
    chi_quotient: Optional[int]


def quotient_check(
    group: GroupBackend, quotient: GroupBackend, words: Sequence[FreeWord], budget: int
) -> List[QuotientRow]:
    """chi in a group never exceeds chi in a quotient.

    The epimorphism is the one matching the two generator lists.
    """
    if group.rank != quotient.rank:
        raise ConfigurationError("group and quotient need generator lists of equal length")
    group_ball, quotient_ball = Ball(group), Ball(quotient)
    rows: List[QuotientRow] = []
    for w in words:
        try:
            chi_q = complexity(quotient, w, budget, quotient_ball)
        except BudgetExceeded:
            rows.append(QuotientRow(format_word(w), None, None))
            continue
        try:
            chi_g = complexity(group, w, chi_q, group_ball)
        except BudgetExceeded:
            raise CertificateFailure(f"complexity of {format_word(w)} in {group.name} exceeds {chi_q} in its quotient")
        rows.append(QuotientRow(format_word(w), chi_g, chi_q))
    return rows


def rank_extension_check(backend: GroupBackend, w: FreeWord, rank: int, budget: int) -> int:
    """The complexity of w does not change when w is read in a free group of larger rank."""
    chi = complexity(backend, w, budget)
    chi_extended = complexity(backend, w.with_rank(rank), budget)
    if chi != chi_extended:
        raise CertificateFailure(f"complexity of {format_word(w)} changed from {chi} to {chi_extended} in rank {rank}")
    return chi


# ---------------------------------------------------------------------------
# Mixed identities
# ---------------------------------------------------------------------------

@monitor("engine", "mif_complexity")
def mif_complexity(backend: GroupBackend, mw: MixedWord, budget: int, the_ball: Optional[Ball] = None) -> int:
    """Least length of g with mw(g) != e."""
    if mw.is_trivial():
        raise MalformedWord("the trivial mixed word has no complexity")
    the_ball = the_ball or Ball(backend)
    constants = [backend.from_word(a) for a in mw.coefficients]
    evaluations = 0
    try:
        for length in range(0, budget + 1):
            for entry in the_ball.stratum(length):
                evaluations += 1
                if not backend.is_identity(substitute_mixed(mw, entry.element, backend, constants)):
                    return length
            if the_ball.saturated and length >= the_ball.radius:
                break
    finally:
        count_evaluations(backend.name, evaluations)
    raise BudgetExceeded(budget, f"mixed complexity of {mw.format()} in {backend.name}")


def _mixed_from_letters(letters: Sequence[int], backend: GroupBackend) -> MixedWord:
    variable = backend.rank + 1
    pairs: List[Tuple[FreeWord, int]] = []
    coefficient: List[int] = []
    exponent = 0
    for letter in letters:
        if abs(letter) == variable:
            exponent += 1 if letter > 0 else -1
        else:
            if exponent:
                pairs.append((FreeWord(tuple(coefficient), backend.rank), exponent))
                coefficient, exponent = [], 0
            coefficient.append(letter)
    pairs.append((FreeWord(tuple(coefficient), backend.rank), exponent))
    return MixedWord.normalize(pairs, backend)


def enumerate_mixed(backend: GroupBackend, n: int) -> Iterator[MixedWord]:
    """Distinct nontrivial mixed words (by normal form) reachable from strings of length <= n."""
    seen = set()
    for w in enumerate_reduced(backend.rank + 1, n):
        mw = _mixed_from_letters(w.letters, backend)
        if mw.is_trivial() or mw in seen:
            continue
        seen.add(mw)
        yield mw


@monitor("engine", "mif_growth")
def mif_growth(backend: GroupBackend, l: int, budget: int) -> GrowthTable:
    """M(n) = max mixed complexity over nontrivial mixed words of length <= n."""
    table = GrowthTable("mixed", backend.name, metadata={"budget": budget})
    the_ball = Ball(backend)
    current, status = 0, EntryStatus.EXACT
    by_length: Dict[int, List[MixedWord]] = {}
    for mw in enumerate_mixed(backend, l):
        by_length.setdefault(mw.length(), []).append(mw)
    for n in range(1, l + 1):
        for mw in by_length.get(n, []):
            try:
                current = max(current, mif_complexity(backend, mw, budget, the_ball))
            except BudgetExceeded:
                current, status = budget + 1, EntryStatus.LOWER_BOUND
        table.add(n, current, status)
    return table


@monitor("engine", "mif_hard_word")
def mif_hard_word(backend: GroupBackend, l: int, the_ball: Optional[Ball] = None) -> MixedWord:
    """A mixed word killed by every g with |g| <= l.

    Combines the commutators [g_i, x] over all nonidentity g_i in B(l).
    """
    if not backend.has_canonical_keys:
        raise ConfigurationError("mixed hard words need a backend with canonical keys")
    the_ball = the_ball or ball(backend, l)
    entries = [entry for entry in the_ball.upto(l) if entry.length > 0]
    m = len(entries)
    if m == 0:
        raise ConfigurationError(f"the ball of radius {l} in {backend.name} is trivial")
    rank = len(backend.generators)
    images = [
        mixed_commutator_with_variable(FreeWord(entry.word, rank), backend) for entry in entries
    ]
    basis = [FreeWord((i,), m) for i in range(1, m + 1)]
    combined = combine(basis) if m > 1 else basis[0]
    mw = substitute_free(combined, images, backend)
    if mw.is_trivial():
        raise CertificateFailure(f"hard mixed word for l={l} in {backend.name} collapsed to the identity")
    bound = 32 * (l + 1) * m * m
    if mw.length() > bound:
        raise LengthBoundViolated(f"hard mixed word has length {mw.length()} > {bound}")
    logger.info(f"Hard mixed word for l={l} in {backend.name}: {m} commutators, length {mw.length()}")
    return mw


@dataclass
class MixedWitness:
    normal_form: MixedWord
    root: FreeWord
    exponent: int
    element: FreeWord
    value: FreeWord

    @property
    def length(self) -> int:
        return len(self.element)


@monitor("engine", "mif_free_witness")
def mif_free_witness(mw: MixedWord, backend: FreeBackend, search_length: int = 12) -> MixedWitness:
    """A short u^m with mw(u^m) != e in a free group.

    u is cyclically reduced, not a proper power and commutes with no
    coefficient; m is the least exponent with |u^m| >= |u^2| l + sum |a_i|.
    """
    if mw.is_trivial():
        raise MalformedWord("the trivial mixed word vanishes everywhere")
    cnf = cyclic_normal_form(mw, backend)
    coefficients = [backend.from_word(a) for a in cnf.coefficients]
    nontrivial = [a for a in coefficients if not a.is_trivial()]
    pure_power = not nontrivial
    l = cnf.syllables
    total = sum(len(a) for a in nontrivial)
    for u in enumerate_reduced(backend.k, search_length):
        if not is_cyclically_reduced(u) or free_root(u)[1] > 1:
            continue
        if any(backend.multiply(u, a) == backend.multiply(a, u) for a in nontrivial):
            continue
        m = max(1, -(-(2 * len(u) * l + total) // len(u)))
        element = u ** m
        value = substitute_mixed(cnf, element, backend, coefficients)
        if pure_power:
            if value.is_trivial():
                raise CertificateFailure(f"power word {cnf.format()} vanished at {format_word(element)}")
        elif backend.multiply(value, u) == backend.multiply(u, value):
            raise CertificateFailure(f"{cnf.format()} at {format_word(element)} commutes with {format_word(u)}")
        original = substitute_mixed(mw, element, backend)
        if original.is_trivial():
            raise CertificateFailure(f"{mw.format()} vanished at {format_word(element)}")
        return MixedWitness(cnf, u, m, element, original)
    raise NotFound(f"no admissible root of length <= {search_length} for {mw.format()}")


def random_mixed_word(backend: GroupBackend, length: int, rng: random.Random) -> MixedWord:
    """A normalized mixed word from a random reduced string of the given length."""
    while True:
        letters = random_reduced(backend.rank + 1, length, rng).letters
        mw = _mixed_from_letters(letters, backend)
        if not mw.is_trivial():
            return mw


def mif_free_trend(backend: FreeBackend, lengths: Sequence[int], samples: int, seed: int = 0) -> GrowthTable:
    """Longest mixed-identity witness over random inputs, per input length."""
    rng = random.Random(seed)
    table = GrowthTable("mixed_free_witness", backend.name, metadata={"samples": samples, "seed": seed})
    for n in lengths:
        longest = 0
        for _ in range(samples):
            witness = mif_free_witness(random_mixed_word(backend, n, rng), backend)
            longest = max(longest, witness.length)
        table.add(n, longest)
    table.metadata["constant_n_log_n"] = measured_constant(table, lambda n: n * math.log(n) if n > 1 else 0.0)
    return table
