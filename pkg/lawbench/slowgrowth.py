"""Groups of prescribed slow lawlessness growth inside (direct sum of
symmetric groups) wr Z.

Gamma(L) is generated by g^, h^ and t, where g^ carries the witness g_{L(i)}
at the coordinate p(i), h^ carries h_{L(i)} at q(i), and t shifts
coordinates. Functions are evaluated lazily, coordinate by coordinate.
"""

import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from cachetools import LRUCache, cached
from loguru import logger
from sympy.combinatorics import Permutation

from .error_handler import CertificateFailure, ConfigurationError, NotFound, UnresolvedWitness
from .groups import DirectSumBackend, GroupBackend, SymBackend, n_cycle
from .engine import vanishing_free
from .monitoring import monitor
from .words import enumerate_reduced, evaluate, format_word

# enumeration cap for Gamma(L) witnesses; words longer than this are not checked
DEFAULT_VERIFY_CAP = 6
SPARSE_LENGTH = 40


# ---------------------------------------------------------------------------
# Sparse functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SparsePair:
    """p(1..N), q(1..N) stored 0-based: ``p[n - 1]`` is p(n)."""

    p: Tuple[int, ...]
    q: Tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.p)

    def p_at(self, n: int) -> int:
        return self.p[n - 1]

    def q_at(self, n: int) -> int:
        return self.q[n - 1]

    def index(self, kind: str, value: int) -> Optional[int]:
        """n with r(n) = value for r = p or q, if any."""
        table = self.p if kind == "g" else self.q
        lookup = _value_index(table)
        return lookup.get(value)


@cached(cache=LRUCache(maxsize=8))
def _value_index(table: Tuple[int, ...]) -> Dict[int, int]:
    return {value: n for n, value in enumerate(table, start=1)}


def sparse_pq(N: int) -> SparsePair:
    """The minimal solution of p(n+1) = p(n) + q(n) + 1, q(n+1) = p(n+1) + q(n) + 1."""
    if N < 2:
        raise ConfigurationError(f"sparse pair needs N >= 2, got {N}")
    p, q = [0], [0]
    for _ in range(N - 1):
        p.append(p[-1] + q[-1] + 1)
        q.append(p[-1] + q[-1] + 1)
    return SparsePair(tuple(p), tuple(q))


def check_sparse(pair: SparsePair) -> bool:
    """Exhaustive check of both difference properties over all index quadruples."""
    N = pair.size
    indices = range(N)
    for r in (pair.p, pair.q):
        differences: Dict[int, List[Tuple[int, int]]] = {}
        for j, k in itertools.product(indices, repeat=2):
            differences.setdefault(r[j] - r[k], []).append((j, k))
        for pairs in differences.values():
            for (j, k), (l, i) in itertools.product(pairs, repeat=2):
                # r(j) - r(k) = r(l) - r(i)
                if not ((i == k and j == l) or (j == k and i == l)):
                    return False
    cross: Dict[int, List[Tuple[int, int]]] = {}
    for j, k in itertools.product(indices, repeat=2):
        cross.setdefault(pair.q[j] - pair.p[k], []).append((j, k))
    return all(len(pairs) == 1 for pairs in cross.values())


# ---------------------------------------------------------------------------
# Witness pairs in the direct sum
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DeltaWitness:
    l: int
    degree: int
    g: Permutation
    h: Permutation
    verified_length: int

    @property
    def exhaustive(self) -> bool:
        return self.verified_length >= self.l

    @property
    def provenance(self) -> str:
        return "exact" if self.exhaustive else "partial"

    @property
    def orders(self) -> Tuple[int, int]:
        return self.g.order(), self.h.order()


def _conjugated_cycle(degree: int, limit: int) -> Iterator[Permutation]:
    """Conjugates of a (degree-1)-cycle: all of them in lexicographic order
    when there are at most ``limit``, otherwise seeded random ones."""
    base = Permutation([list(range(degree - 1))], size=degree)
    if math.factorial(degree) <= limit:
        conjugators: Iterable[Sequence[int]] = itertools.permutations(range(degree))
    else:
        rng = random.Random(degree)
        conjugators = (rng.sample(range(degree), degree) for _ in range(limit))
    for sigma in conjugators:
        s = Permutation(list(sigma))
        yield ~s * base * s


@cached(cache=LRUCache(maxsize=64))
def delta_witness(l: int, verify_cap: Optional[int] = None, search_limit: int = 50_000) -> DeltaWitness:
    """A pair in Sym(l+2) on which no nontrivial word of length <= l vanishes.

    With ``verify_cap`` only words up to min(l, cap) are enumerated and the
    witness is partial (``verified_length < l``).

    g is the (l+2)-cycle and h a conjugate of an (l+1)-cycle, so the orders
    of both strictly increase with l.
    """
    if l < 1:
        raise ConfigurationError(f"witness length must be >= 1, got {l}")
    degree = l + 2
    backend = SymBackend(degree)
    g = n_cycle(degree)
    verified = l if verify_cap is None else min(l, verify_cap)
    for attempt, h in enumerate(_conjugated_cycle(degree, search_limit)):
        if attempt >= search_limit:
            break
        if not vanishing_free([g, h], backend, verified):
            logger.debug(f"Delta witness for l={l} after {attempt + 1} conjugates")
            if verified < l:
                logger.warning(f"Delta witness for l={l} checked only up to length {verified}")
            return DeltaWitness(l, degree, g, h, verified)
    raise NotFound(f"no witness pair in Sym({degree}) within {search_limit} conjugates")


# ---------------------------------------------------------------------------
# The schedule L
# ---------------------------------------------------------------------------

GrowthFunction = Union[Callable[[int], int], Sequence[int]]
SEARCH_LIMIT = 2 ** 64


def named_function(name: str) -> Callable[[int], int]:
    """Growth functions by CLI name; each has f(1) >= 2."""
    if name in ("n", "linear", "identity"):
        return lambda n: max(n, 2)
    if name in ("log", "log2"):
        return lambda n: n.bit_length() + 1
    if name == "sqrt":
        return lambda n: math.isqrt(n) + 1
    raise ConfigurationError(f"unknown growth function {name!r}; expected n, log or sqrt")


def _as_callable(f: GrowthFunction) -> Tuple[Callable[[int], int], int]:
    if callable(f):
        return f, SEARCH_LIMIT
    table = list(f)
    if not table:
        raise ConfigurationError("empty growth table")
    if any(a > b for a, b in zip(table, table[1:])):
        raise ConfigurationError("growth table must be nondecreasing")
    return (lambda n: table[n - 1]), len(table)


def _least_reaching(f: Callable[[int], int], target: int, start: int, limit: int) -> int:
    """Least n >= start with f(n) >= target, for nondecreasing f."""
    if f(start) >= target:
        return start
    lo, hi = start, start + 1
    while f(min(hi, limit)) < target:
        if hi >= limit:
            raise ConfigurationError(f"growth function never reaches {target} up to {limit}")
        lo, hi = hi, min(2 * hi, limit)
    hi = min(hi, limit)
    while hi - lo > 1:
        middle = (lo + hi) // 2
        if f(middle) >= target:
            hi = middle
        else:
            lo = middle
    return hi


def schedule_L(f: GrowthFunction, M: int, pair: Optional[SparsePair] = None) -> List[int]:
    """L(1..M): least, strictly increasing, with f(L(m)) >= 2(q(m+1) - p(m+1) + 1)."""
    func, limit = _as_callable(f)
    if func(1) < 2:
        raise ConfigurationError(f"f(1) must be >= 2, got {func(1)}")
    pair = pair or sparse_pq(max(M + 1, 2))
    if pair.size < M + 1:
        raise ConfigurationError(f"sparse pair of size {pair.size} is too short for M = {M}")
    L: List[int] = []
    for m in range(1, M + 1):
        target = 2 * (pair.q_at(m + 1) - pair.p_at(m + 1) + 1)
        start = L[-1] + 1 if L else 1
        L.append(_least_reaching(func, target, start, limit))
    return L


# ---------------------------------------------------------------------------
# Gamma(L)
# ---------------------------------------------------------------------------

Factor = Tuple[str, int, int]


def _reduce_factors(factors: Sequence[Factor]) -> Tuple[Factor, ...]:
    stack: List[Factor] = []
    for kind, sign, shift in factors:
        if stack and stack[-1] == (kind, -sign, shift):
            stack.pop()
        else:
            stack.append((kind, sign, shift))
    return tuple(stack)


@dataclass(frozen=True)
class GammaElement:
    """phi t^m, where phi is the ordered product of (kind^sign)^(t^shift)
    and (f^(t^s))(z) = f(z - s)."""

    m: int = 0
    factors: Tuple[Factor, ...] = ()

    def classes(self) -> Dict[Tuple[str, int], int]:
        """Net exponent of every (kind, shift) class."""
        net: Dict[Tuple[str, int], int] = {}
        for kind, sign, shift in self.factors:
            net[(kind, shift)] = net.get((kind, shift), 0) + sign
        return net


G_HAT = GammaElement(0, (("g", 1, 0),))
H_HAT = GammaElement(0, (("h", 1, 0),))
T = GammaElement(1, ())
GAMMA_IDENTITY = GammaElement()


def gamma_multiply(a: GammaElement, b: GammaElement) -> GammaElement:
    shifted = tuple((kind, sign, shift - a.m) for kind, sign, shift in b.factors)
    return GammaElement(a.m + b.m, _reduce_factors(a.factors + shifted))


def gamma_invert(a: GammaElement) -> GammaElement:
    factors = tuple((kind, -sign, shift + a.m) for kind, sign, shift in reversed(a.factors))
    return GammaElement(-a.m, factors)


def gamma_conjugate(a: GammaElement, shift: int) -> GammaElement:
    """a^(t^shift) = t^-shift a t^shift."""
    t_power = GammaElement(shift, ())
    return gamma_multiply(gamma_multiply(GammaElement(-shift, ()), a), t_power)


def _intersection_indices(pair: SparsePair, kind_a: str, kind_b: str, d: int) -> List[Tuple[int, int]]:
    """(i, j) with r_a(i) - r_b(j) = d; at most one unless the classes coincide."""
    bound = 1
    while bound < pair.size and pair.p_at(bound) < abs(d):
        bound += 1
    bound = min(bound + 1, pair.size)
    table_a = pair.p if kind_a == "g" else pair.q
    table_b = pair.p if kind_b == "g" else pair.q
    return [
        (i, j)
        for i in range(1, bound + 1)
        for j in range(1, bound + 1)
        if table_a[i - 1] - table_b[j - 1] == d
    ]


def support_intersections(classes: Sequence[Tuple[str, int]], pair: SparsePair) -> List[int]:
    """Coordinates lying in the supports of at least two distinct classes."""
    coordinates = set()
    for (kind_a, shift_a), (kind_b, shift_b) in itertools.combinations(sorted(set(classes)), 2):
        # r_a(i) + shift_a = r_b(j) + shift_b
        for i, _ in _intersection_indices(pair, kind_a, kind_b, shift_b - shift_a):
            table = pair.p if kind_a == "g" else pair.q
            coordinates.add(table[i - 1] + shift_a)
    return sorted(coordinates)


@dataclass
class GammaGroup:
    """Gamma(L) with witnesses materialized for schedule indices 1..max_index.

    Witnesses are enumerated only up to ``verify_cap`` (None for all of l);
    capped ones carry provenance "partial".
    """

    f: GrowthFunction
    max_index: int = 3
    verify_cap: Optional[int] = DEFAULT_VERIFY_CAP
    pair: SparsePair = field(default_factory=lambda: sparse_pq(SPARSE_LENGTH))
    L: List[int] = field(init=False)
    witnesses: Dict[int, DeltaWitness] = field(init=False, default_factory=dict)

    def __post_init__(self):
        if self.max_index < 1:
            raise ConfigurationError(f"max_index must be >= 1, got {self.max_index}")
        self.L = schedule_L(self.f, self.max_index + 1, self.pair)
        # generators are unused; the direct sum only supplies its arithmetic
        self.delta = DirectSumBackend(max(self.L[: self.max_index]) + 2, generators=[()])

    def witness(self, i: int) -> DeltaWitness:
        if i > self.max_index:
            raise UnresolvedWitness(i, self.max_index)
        if i not in self.witnesses:
            self.witnesses[i] = delta_witness(self.L[i - 1], self.verify_cap)
        return self.witnesses[i]

    def coordinate(self, kind: str, z: int) -> Tuple[Tuple[int, Permutation], ...]:
        """g^(z) or h^(z) as a direct-sum element."""
        i = self.pair.index(kind, z)
        if i is None:
            if z > max(self.pair.p[-1], self.pair.q[-1]):
                raise UnresolvedWitness(self.pair.size + 1, self.max_index)
            return ()
        w = self.witness(i)
        return ((w.degree, w.g if kind == "g" else w.h),)

    def value_at(self, e: GammaElement, z: int) -> Tuple[Tuple[int, Permutation], ...]:
        """The base-group coordinate of e at z, an element of the direct sum."""
        result = self.delta.identity()
        for kind, sign, shift in e.factors:
            value = self.coordinate(kind, z - shift)
            if sign < 0:
                value = self.delta.invert(value)
            result = self.delta.multiply(result, value)
        return result

    def exceptional_coordinates(self, e: GammaElement) -> List[int]:
        return support_intersections(list(e.classes().keys()), self.pair)

    def is_identity_gamma(self, e: GammaElement) -> bool:
        """Decides e = 1 from the t-exponent, the class exponents and the exceptional coordinates."""
        if e.m != 0:
            return False
        if any(net != 0 for net in e.classes().values()):
            return False
        return all(self.delta.is_identity(self.value_at(e, z)) for z in self.exceptional_coordinates(e))

    def brute_force_identity(self, e: GammaElement, window: Tuple[int, int]) -> bool:
        """Coordinate-wise check over a finite window of coordinates."""
        if e.m != 0:
            return False
        lo, hi = window
        return all(self.delta.is_identity(self.value_at(e, z)) for z in range(lo, hi + 1))


class GammaBackend(GroupBackend):
    """Gamma(L) over the generators g^, h^, t. Equality only, no canonical keys."""

    def __init__(self, group: GammaGroup):
        self.group = group
        self.name = "gamma"
        super().__init__([G_HAT, H_HAT, T], ["g", "h", "t"])

    def identity(self) -> GammaElement:
        return GAMMA_IDENTITY

    def multiply(self, g: GammaElement, h: GammaElement) -> GammaElement:
        return gamma_multiply(g, h)

    def invert(self, g: GammaElement) -> GammaElement:
        return gamma_invert(g)

    def is_identity(self, g: GammaElement) -> bool:
        if g == GAMMA_IDENTITY:
            return True
        return self.group.is_identity_gamma(g)


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------

@dataclass
class SlowCertificate:
    n: int
    bound: int
    f_value: int
    words: int


@dataclass
class SlowReport:
    L: List[int]
    certificates: List[SlowCertificate]
    witnesses: List[DeltaWitness] = field(default_factory=list)
    passed: bool = True

    @property
    def partial_witnesses(self) -> List[int]:
        return [w.l for w in self.witnesses if not w.exhaustive]

    @property
    def witness_provenance(self) -> str:
        return "partial" if self.partial_witnesses else "exact"


@monitor("slowgrowth", "verify_slow")
def verify_slow(f: GrowthFunction, n_max: int, verify_cap: Optional[int] = DEFAULT_VERIFY_CAP) -> SlowReport:
    """Certifies chi(w) <= f(n) in Gamma(L) for every nontrivial |w| <= n <= n_max."""
    func, _ = _as_callable(f)
    if n_max < 1:
        raise ConfigurationError(f"n_max must be >= 1, got {n_max}")
    pair = sparse_pq(SPARSE_LENGTH)
    index_needed = 1
    while schedule_L(f, index_needed, pair)[-1] < n_max:
        index_needed += 1
    group = GammaGroup(f, max_index=index_needed, verify_cap=verify_cap, pair=pair)
    backend = GammaBackend(group)
    logger.info(f"Slow-growth verification up to n = {n_max} with L = {group.L[:index_needed]}")

    worst: Dict[int, int] = {}
    counts: Dict[int, int] = {}
    for w in enumerate_reduced(2, n_max):
        j = next(i for i in range(1, index_needed + 1) if group.L[i - 1] >= len(w))
        shift = pair.q_at(j) - pair.p_at(j)
        tuple_length = 2 * (shift + 1)
        witness = group.witness(j)
        element = evaluate(w, [gamma_conjugate(G_HAT, shift), H_HAT], backend)
        value = group.value_at(element, pair.q_at(j))
        sym = SymBackend(witness.degree)
        direct = evaluate(w, [witness.g, witness.h], sym)
        if sym.is_identity(direct):
            raise CertificateFailure(f"{format_word(w)} vanishes on the witness pair for l = {witness.l}")
        if group.delta.canonical_key(value) != group.delta.canonical_key(((witness.degree, direct),)):
            raise CertificateFailure(f"coordinate {pair.q_at(j)} of {format_word(w)} disagrees with the direct evaluation")
        worst[len(w)] = max(worst.get(len(w), 0), tuple_length)
        counts[len(w)] = counts.get(len(w), 0) + 1

    certificates: List[SlowCertificate] = []
    running = 0
    for n in range(1, n_max + 1):
        running = max(running, worst.get(n, 0))
        if running > func(n):
            raise CertificateFailure(f"certified bound {running} exceeds f({n}) = {func(n)}")
        certificates.append(SlowCertificate(n, running, func(n), counts.get(n, 0)))
    witnesses = [group.witness(i) for i in range(1, index_needed + 1)]
    return SlowReport(group.L[:index_needed], certificates, witnesses)
