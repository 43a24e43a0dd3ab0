"""Thompson's group F as piecewise-linear homeomorphisms of the real line.

Maps are exact: breakpoints and images are Fractions, and outside the
breakpoints every map is a translation. Composition is ``f o g``
(g applied first).
"""

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Hashable, List, Optional, Sequence, Tuple, Union

from loguru import logger

from .engine import Ball, vanishing_free
from .error_handler import BudgetExceeded, CertificateFailure, ConfigurationError, DyadicOverflow
from .groups import GroupBackend
from .monitoring import monitor
from .words import ball_size

Point = Tuple[Fraction, Fraction]
Number = Union[int, Fraction]

DEFAULT_DYADIC_CAP = 64
_dyadic_cap = DEFAULT_DYADIC_CAP


def set_dyadic_cap(cap: int) -> None:
    global _dyadic_cap
    if cap < 1:
        raise ConfigurationError(f"dyadic cap must be >= 1, got {cap}")
    _dyadic_cap = cap


def is_power_of_two(q: Fraction) -> bool:
    """True for 2^j, j any integer."""
    if q <= 0:
        return False
    num, den = q.numerator, q.denominator
    return num & (num - 1) == 0 and den & (den - 1) == 0


def is_dyadic(q: Fraction) -> bool:
    den = Fraction(q).denominator
    return den & (den - 1) == 0


def _check_cap(q: Fraction) -> None:
    if q.denominator.bit_length() - 1 > _dyadic_cap:
        raise DyadicOverflow(f"{q} needs more than 2^{_dyadic_cap} in its denominator")


def _slope(p: Point, q: Point) -> Fraction:
    return (q[1] - p[1]) / (q[0] - p[0])


@dataclass(frozen=True)
class PLMap:
    """Breakpoints (x, f(x)) in increasing order; f(x) = x + left below the
    first and x + right above the last. Canonical: no removable breakpoint."""

    points: Tuple[Point, ...] = ()
    left: Fraction = Fraction(0)
    right: Fraction = Fraction(0)

    def __call__(self, x: Number) -> Fraction:
        return evaluate(self, x)

    @property
    def breakpoints(self) -> List[Fraction]:
        return [x for x, _ in self.points]

    def slopes(self) -> List[Fraction]:
        return [_slope(p, q) for p, q in zip(self.points, self.points[1:])]

    def is_identity(self) -> bool:
        return not self.points and self.left == 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "points": [[str(x), str(y)] for x, y in self.points],
            "left": str(self.left),
            "right": str(self.right),
        }


def make_map(points: Sequence[Tuple[Number, Number]], translation: Number = 0) -> PLMap:
    """Canonical PLMap through the given points; a pure translation when empty."""
    pts = [(Fraction(x), Fraction(y)) for x, y in points]
    if not pts:
        return PLMap((), Fraction(translation), Fraction(translation))
    return canonicalize(pts)


def canonicalize(points: Sequence[Point]) -> PLMap:
    pts = sorted(points)
    for p, q in zip(pts, pts[1:]):
        if q[0] == p[0]:
            if q[1] != p[1]:
                raise ConfigurationError(f"two images given for {p[0]}")
        elif q[1] <= p[1]:
            raise ConfigurationError(f"map is not increasing between {p[0]} and {q[0]}")
    unique: List[Point] = []
    for p in pts:
        if not unique or unique[-1][0] != p[0]:
            unique.append(p)
    left = unique[0][1] - unique[0][0]
    right = unique[-1][1] - unique[-1][0]
    kept: List[Point] = []
    for i, p in enumerate(unique):
        before = _slope(kept[-1], p) if kept else Fraction(1)
        after = _slope(p, unique[i + 1]) if i + 1 < len(unique) else Fraction(1)
        if before != after:
            kept.append(p)
    for x, y in kept:
        _check_cap(x)
        _check_cap(y)
    if not kept:
        return PLMap((), left, left)
    return PLMap(tuple(kept), left, right)


def evaluate(f: PLMap, x: Number) -> Fraction:
    x = Fraction(x)
    points = f.points
    if not points or x <= points[0][0]:
        return x + f.left
    if x >= points[-1][0]:
        return x + f.right
    i = bisect_right([p[0] for p in points], x)
    (x0, y0), (x1, y1) = points[i - 1], points[i]
    return y0 + (x - x0) * (y1 - y0) / (x1 - x0)


def invert(f: PLMap) -> PLMap:
    return PLMap(tuple((y, x) for x, y in f.points), -f.left, -f.right)


def compose(f: PLMap, g: PLMap) -> PLMap:
    """f o g."""
    g_inverse = invert(g)
    xs = set(g.breakpoints) | {evaluate(g_inverse, x) for x in f.breakpoints}
    if not xs:
        translation = f.left + g.left
        return PLMap((), translation, translation)
    return canonicalize([(x, evaluate(f, evaluate(g, x))) for x in xs])


def equals(f: PLMap, g: PLMap) -> bool:
    return f == g


IDENTITY = PLMap()
A = make_map([], 1)
B = make_map([(0, 0), (1, 2)])


def power(f: PLMap, exponent: int) -> PLMap:
    if exponent < 0:
        f, exponent = invert(f), -exponent
    result = IDENTITY
    for _ in range(exponent):
        result = compose(result, f)
    return result


def compose_all(*maps: PLMap) -> PLMap:
    result = IDENTITY
    for f in maps:
        result = compose(result, f)
    return result


def is_member(f: Any) -> bool:
    """Dyadic breakpoints, power-of-two slopes and integer tail translations."""
    if not isinstance(f, PLMap):
        return False
    if f.left.denominator != 1 or f.right.denominator != 1:
        return False
    if not all(is_dyadic(x) and is_dyadic(y) for x, y in f.points):
        return False
    return all(is_power_of_two(s) for s in f.slopes())


# ---------------------------------------------------------------------------
# T, U_n and V_n
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PeriodicPLMap:
    """f(x + period) = f(x) + period, given by its points on [0, period]."""

    period: Fraction
    points: Tuple[Point, ...]

    def __call__(self, x: Number) -> Fraction:
        x = Fraction(x)
        shifts = x // self.period
        base = PLMap(self.points, Fraction(0), Fraction(0))
        return evaluate(base, x - shifts * self.period) + shifts * self.period

    def restrict(self, lo: int, hi: int) -> PLMap:
        """The map on [lo, hi] (both multiples of the period), identity outside."""
        if lo % self.period or hi % self.period or hi <= lo:
            raise ConfigurationError(f"restriction interval [{lo}, {hi}] must be period-aligned")
        points: List[Point] = []
        for k in range(int(lo // self.period), int(hi // self.period)):
            shift = k * self.period
            points.extend((x + shift, y + shift) for x, y in self.points)
        return canonicalize(points)


def make_T() -> PeriodicPLMap:
    points = [(0, 0), (1, 2), (2, 3), (6, 5), (7, 6), (8, 8)]
    return PeriodicPLMap(Fraction(8), tuple((Fraction(x), Fraction(y)) for x, y in points))


T = make_T()


def make_Un(n: int) -> PLMap:
    """T^2 on [0, 8(n+1)], identity elsewhere."""
    if n < 0:
        raise ConfigurationError(f"U_n needs n >= 0, got {n}")
    restricted = T.restrict(0, 8 * (n + 1))
    return compose(restricted, restricted)


def make_Vn(n: int) -> PLMap:
    """V_n = A^2 U_n A^-2."""
    return compose_all(power(A, 2), make_Un(n), power(A, -2))


def check_recursion(n: int) -> bool:
    """U_{n+1} = A^8 U_n A^-8 U_0, exactly."""
    left = compose_all(power(A, 8), make_Un(n), power(A, -8), make_Un(0))
    return equals(left, make_Un(n + 1))


# ---------------------------------------------------------------------------
# Backend, lengths and the witness check
# ---------------------------------------------------------------------------

class ThompsonBackend(GroupBackend):
    name = "thompson"

    def __init__(self, generators: Optional[Sequence[PLMap]] = None, names: Optional[Sequence[str]] = None):
        generators = list(generators) if generators is not None else [A, B]
        names = list(names) if names is not None else ["A", "B"][:len(generators)]
        super().__init__(generators, names)

    def identity(self) -> PLMap:
        return IDENTITY

    def multiply(self, g: PLMap, h: PLMap) -> PLMap:
        return compose(g, h)

    def invert(self, g: PLMap) -> PLMap:
        return invert(g)

    def is_identity(self, g: PLMap) -> bool:
        return g.is_identity()

    def canonical_key(self, g: PLMap) -> Hashable:
        return g

    def format(self, g: PLMap) -> str:
        return str(g.to_dict())


@monitor("thompson", "word_length_bfs")
def word_length_bfs(f: PLMap, budget: int = 8) -> int:
    """|f| over {A, B}, or BudgetExceeded when f is not within radius ``budget``."""
    the_ball = Ball(ThompsonBackend())
    for radius in range(0, budget + 1):
        the_ball.grow_to(radius)
        length = the_ball.length_of(f)
        if length is not None:
            return length
    raise BudgetExceeded(budget, "word length in F")


@dataclass
class LengthBounds:
    n: int
    u_bound: Union[int, str]
    v_bound: Union[int, str]


def length_bounds(n: int, M: Optional[int] = None) -> LengthBounds:
    """|U_n| <= (M+16)n + M and |V_n| <= |U_n| + 4, with M = |U_0|."""
    if M is None:
        return LengthBounds(n, f"(M+16)*{n}+M", f"(M+16)*{n}+M+4")
    u = (M + 16) * n + M
    return LengthBounds(n, u, u + 4)


@dataclass
class BrinSquierReport:
    n: int
    words_checked: int
    passed: bool


@monitor("thompson", "brin_squier_check")
def brin_squier_check(n: int) -> BrinSquierReport:
    """Every nontrivial w in F_2 with |w| <= n survives at (U_n, V_n)."""
    if n < 1:
        raise ConfigurationError(f"word length must be >= 1, got {n}")
    backend = ThompsonBackend()
    pair = [make_Un(n), make_Vn(n)]
    if vanishing_free(pair, backend, n):
        raise CertificateFailure(f"some word of length <= {n} vanishes at (U_{n}, V_{n})")
    checked = ball_size(2, n) - 1
    logger.info(f"(U_{n}, V_{n}) separates all {checked} nontrivial words of length <= {n}")
    return BrinSquierReport(n, checked, True)
