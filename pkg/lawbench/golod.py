"""Truncated Magnus embedding over F_p, the degree function and
Golod-Shafarevich certificates for relation schedules.

All inequality arithmetic is exact (Fraction); nothing here uses floats.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from loguru import logger
from sympy import isprime

from .error_handler import ConfigurationError, MalformedWord
from .monitoring import monitor
from .words import FreeWord, ball_size, enumerate_reduced, format_word, power as word_power

Monomial = Tuple[int, ...]
Rational = Union[int, Fraction]


class TruncSeries:
    """Noncommutative power series in u_0..u_{k-1} over F_p, truncated above ``cap``."""

    __slots__ = ("p", "k", "cap", "coeffs")

    def __init__(self, p: int, k: int, cap: int, coeffs: Optional[Dict[Monomial, int]] = None):
        if cap < 1:
            raise ConfigurationError(f"degree cap must be >= 1, got {cap}")
        self.p = p
        self.k = k
        self.cap = cap
        self.coeffs: Dict[Monomial, int] = {}
        for monomial, c in (coeffs or {}).items():
            c %= p
            if c and len(monomial) <= cap:
                self.coeffs[monomial] = c

    @classmethod
    def one(cls, p: int, k: int, cap: int) -> "TruncSeries":
        return cls(p, k, cap, {(): 1})

    @classmethod
    def variable(cls, i: int, p: int, k: int, cap: int) -> "TruncSeries":
        return cls(p, k, cap, {(i,): 1})

    def _like(self, coeffs: Dict[Monomial, int]) -> "TruncSeries":
        return TruncSeries(self.p, self.k, self.cap, coeffs)

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        result = dict(self.coeffs)
        for monomial, c in other.coeffs.items():
            result[monomial] = result.get(monomial, 0) + c
        return self._like(result)

    def __sub__(self, other: "TruncSeries") -> "TruncSeries":
        return self + other.scale(-1)

    def scale(self, factor: int) -> "TruncSeries":
        return self._like({m: c * factor for m, c in self.coeffs.items()})

    def __mul__(self, other: "TruncSeries") -> "TruncSeries":
        result: Dict[Monomial, int] = {}
        for m1, c1 in self.coeffs.items():
            room = self.cap - len(m1)
            for m2, c2 in other.coeffs.items():
                if len(m2) <= room:
                    key = m1 + m2
                    result[key] = (result.get(key, 0) + c1 * c2) % self.p
        return self._like(result)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return (self.p, self.k, self.cap, self.coeffs) == (other.p, other.k, other.cap, other.coeffs)

    def times_letter(self, letter: int) -> "TruncSeries":
        """Right multiplication by 1 + u_i (letter i+1) or its inverse series (letter -(i+1))."""
        i = abs(letter) - 1
        p, cap = self.p, self.cap
        result: Dict[Monomial, int] = {}
        for monomial, c in self.coeffs.items():
            result[monomial] = (result.get(monomial, 0) + c) % p
            room = cap - len(monomial)
            if letter > 0:
                if room >= 1:
                    key = monomial + (i,)
                    result[key] = (result.get(key, 0) + c) % p
            else:
                sign = 1
                for j in range(1, room + 1):
                    sign = -sign
                    key = monomial + (i,) * j
                    result[key] = (result.get(key, 0) + sign * c) % p
        return self._like(result)

    def lowest_degree(self, skip_constant: bool = False) -> Optional[int]:
        degrees = [len(m) for m in self.coeffs if not (skip_constant and not m)]
        return min(degrees) if degrees else None

    def __repr__(self) -> str:
        return f"TruncSeries(p={self.p}, cap={self.cap}, terms={len(self.coeffs)})"


def magnus(w: FreeWord, cap: int, p: int = 2) -> TruncSeries:
    """Image of w under x_i -> 1 + u_i, truncated above degree ``cap``."""
    series = TruncSeries.one(p, w.rank, cap)
    for letter in w.letters:
        series = series.times_letter(letter)
    return series


@dataclass(frozen=True)
class Degree:
    """D(w) when ``exact``; otherwise a lower bound (cap + 1)."""

    value: int
    exact: bool


def degree(w: FreeWord, cap: int, p: int = 2) -> Degree:
    """Least degree of a nonzero monomial in magnus(w) - 1."""
    if w.is_trivial():
        raise MalformedWord("the degree of the trivial word is infinite")
    # truncating at d leaves every coefficient of degree <= d exact
    for d in range(1, cap + 1):
        series = magnus(w, d, p) - TruncSeries.one(p, w.rank, d)
        lowest = series.lowest_degree()
        if lowest is not None:
            return Degree(lowest, True)
    return Degree(cap + 1, False)


def check_degree_power(w: FreeWord, p: int, cap: int) -> Optional[bool]:
    """Whether D(w^p) = p D(w); None when p D(w) lies beyond the cap."""
    base = degree(w, cap, p)
    if not base.exact or p * base.value > cap:
        return None
    powered = degree(word_power(w, p), p * base.value, p)
    return powered.exact and powered.value == p * base.value


# ---------------------------------------------------------------------------
# Certificates
# ---------------------------------------------------------------------------

def as_fraction(value: Union[str, Rational]) -> Fraction:
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError):
        raise ConfigurationError(f"{value!r} is not a rational number")


@dataclass
class TailSpec:
    """Relations with degree >= p^(m + m0), at most C q^(p^m) of them, for every m >= 1."""

    p: int
    q: Fraction
    C: Fraction
    m0: int
    prefix: int = 4


@dataclass
class GSCertificate:
    k: int
    tau: Fraction
    finite_sum: Fraction
    prefix_sum: Fraction = Fraction(0)
    tail_bound: Fraction = Fraction(0)
    h: Optional[Fraction] = None
    value: Optional[Fraction] = None
    accepted: bool = False
    reason: str = ""

    @property
    def relation_sum(self) -> Fraction:
        return self.finite_sum + self.prefix_sum + self.tail_bound

    @property
    def threshold(self) -> Fraction:
        """The relation sum has to stay below k tau - 1."""
        return self.k * self.tau - 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            "k": self.k,
            "tau": str(self.tau),
            "finite_sum": str(self.finite_sum),
            "prefix_sum": str(self.prefix_sum),
            "tail_bound": str(self.tail_bound),
            "relation_sum": str(self.relation_sum),
            "relation_sum_float": float(self.relation_sum),
            "threshold": str(self.threshold),
            "h": None if self.h is None else str(self.h),
            "value": None if self.value is None else str(self.value),
            "accepted": self.accepted,
            "reason": self.reason,
        }


@monitor("golod", "gs_verify")
def gs_verify(k: int, tau: Rational, degrees: Iterable[int] = (), tail: Optional[TailSpec] = None) -> GSCertificate:
    """Certifies 1 - k tau + sum over relations of tau^D(r) < 0."""
    tau = as_fraction(tau)
    if not 0 < tau < 1:
        raise ConfigurationError(f"tau must lie strictly between 0 and 1, got {tau}")
    if k < 1:
        raise ConfigurationError(f"k must be >= 1, got {k}")
    finite = sum((tau ** d for d in degrees), Fraction(0))
    certificate = GSCertificate(k, tau, finite)
    if tail is not None:
        h = tail.q * tau ** (tail.p ** tail.m0)
        certificate.h = h
        if h >= 1:
            certificate.reason = f"tail ratio h = {h} >= 1, geometric tail bound does not apply"
            logger.info(f"GS certificate rejected: {certificate.reason}")
            return certificate
        certificate.prefix_sum = tail.C * sum((h ** (tail.p ** m) for m in range(1, tail.prefix + 1)), Fraction(0))
        certificate.tail_bound = tail.C * h ** (tail.p ** (tail.prefix + 1)) / (1 - h)
    value = 1 - k * tau + certificate.relation_sum
    certificate.value = value
    certificate.accepted = value < 0
    certificate.reason = "inequality certified" if certificate.accepted else "sum is not below the threshold"
    return certificate


def in_range(k: int, q: Rational, c: Rational) -> bool:
    """0 < c < log(q) / log(2k - 1), decided exactly."""
    c, q = Fraction(c), Fraction(q)
    if c <= 0:
        return False
    if 2 * k - 1 == 1:
        return q > 1
    return Fraction(2 * k - 1) ** c.numerator < q ** c.denominator


@dataclass
class Schedule:
    k: int
    p: int
    q: Fraction
    c: Fraction
    m0: int
    C: Fraction = field(init=False)

    def __post_init__(self):
        if self.k < 2:
            raise ConfigurationError(f"schedules need k >= 2, got {self.k}")
        if not isprime(self.p):
            raise ConfigurationError(f"p must be prime, got {self.p}")
        if self.m0 < 0:
            raise ConfigurationError(f"m0 must be >= 0, got {self.m0}")
        self.q = Fraction(self.q)
        self.c = Fraction(self.c)
        if not in_range(self.k, self.q, self.c):
            raise ConfigurationError(f"c = {self.c} is outside (0, log q / log(2k-1)) for q = {self.q}, k = {self.k}")
        self.C = Fraction(self.k, self.k - 1)

    def a(self, m: int) -> Fraction:
        """Relation count threshold: a_0 = 0, a_m = C q^(p^m)."""
        if m == 0:
            return Fraction(0)
        return self.C * self.q ** (self.p ** m)

    def radius(self, m: int) -> int:
        return int(self.c * self.p ** m)

    def verify_balls(self, depth: int) -> List[Dict[str, Any]]:
        """a_m >= |B(c p^m)| for m = 1..depth."""
        rows = []
        for m in range(1, depth + 1):
            size = ball_size(self.k, self.radius(m))
            a_m = self.a(m)
            if a_m < size:
                raise ConfigurationError(f"a_{m} = {a_m} is below the ball size {size}")
            rows.append({"m": m, "radius": self.radius(m), "ball_size": size, "a_m": str(a_m)})
        return rows

    def exponent(self, n: int) -> int:
        """p^(m + m0) for the m with a_{m-1} < n <= a_m."""
        if n < 1:
            raise ConfigurationError(f"relation index must be >= 1, got {n}")
        m = 1
        while n > self.a(m):
            m += 1
        return self.p ** (m + self.m0)

    def relation(self, n: int) -> Tuple[FreeWord, int]:
        """(w_n, exponent): the n-th nontrivial word in ball order and its power."""
        for index, w in enumerate(enumerate_reduced(self.k, n), start=1):
            if index == n:
                return w, self.exponent(n)
        raise ConfigurationError(f"no word with index {n}")

    def tail(self, prefix: int = 4) -> TailSpec:
        return TailSpec(self.p, self.q, self.C, self.m0, prefix)

    @property
    def torsion_slope(self) -> Fraction:
        """o(g) <= slope * |g| in the quotient."""
        return Fraction(self.p ** (self.m0 + 1)) / self.c

    def to_dict(self) -> Dict[str, Any]:
        return {
            "k": self.k,
            "p": self.p,
            "q": str(self.q),
            "c": str(self.c),
            "m0": self.m0,
            "C": str(self.C),
            "torsion_slope": str(self.torsion_slope),
        }


def build_schedule(k: int, p: int, q: Rational, c: Rational, m0: int, depth: int = 4) -> Tuple[Schedule, List[Dict[str, Any]]]:
    schedule = Schedule(k, p, as_fraction(q), as_fraction(c), m0)
    return schedule, schedule.verify_balls(depth)


@dataclass
class LeastM0:
    m0: int
    schedule: Schedule
    accepted: GSCertificate
    rejected: Optional[GSCertificate]


@monitor("golod", "least_m0")
def least_m0(k: int, p: int, q: Rational, c: Rational, tau: Rational, depth: int = 4, max_m0: int = 12) -> LeastM0:
    """Least m0 whose schedule passes gs_verify, with the certificate rejecting m0 - 1."""
    rejected: Optional[GSCertificate] = None
    for m0 in range(0, max_m0 + 1):
        schedule, _ = build_schedule(k, p, q, c, m0, depth)
        certificate = gs_verify(k, tau, tail=schedule.tail(depth))
        if certificate.accepted:
            logger.info(f"Least accepting m0 = {m0} for k={k}, p={p}, q={q}, tau={tau}")
            return LeastM0(m0, schedule, certificate, rejected)
        rejected = certificate
    raise ConfigurationError(f"no m0 <= {max_m0} satisfies the inequality")


def degree_table(words: Sequence[FreeWord], p: int, cap: int) -> List[Dict[str, Any]]:
    rows = []
    for w in words:
        d = degree(w, cap, p)
        rows.append({"word": format_word(w), "degree": d.value, "exact": d.exact, "power_check": check_degree_power(w, p, cap)})
    return rows
