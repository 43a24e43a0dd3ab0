"""Group backends: the contract every concrete group implements, plus the
free, symmetric and direct-sum backends."""

import re
from abc import ABC, abstractmethod
from typing import Any, Hashable, Iterable, List, Optional, Sequence, Tuple

from loguru import logger
from sympy.combinatorics import Permutation

from .error_handler import BudgetExceeded, ConfigurationError, InvalidGenerator, MalformedCycle
from .words import FreeWord, identity_word, multiply as free_multiply

_CYCLE = re.compile(r"\(([^()]*)\)")


class GroupBackend(ABC):
    """A finitely generated group with a decidable word problem.

    Elements are opaque values. Backends that can compute a canonical form
    return it from :meth:`canonical_key`; equality-only backends return None
    and callers fall back to :meth:`equal`.
    """

    name: str = "group"

    def __init__(self, generators: Sequence[Any], generator_names: Sequence[str]):
        if len(generators) != len(generator_names):
            raise ConfigurationError("one display name per generator is required")
        if not generators:
            raise ConfigurationError("a backend needs at least one generator")
        self.generators: List[Any] = list(generators)
        self.generator_names: List[str] = list(generator_names)
        self.involutions: List[bool] = [
            not self.is_identity(g) and self.is_identity(self.multiply(g, g)) for g in self.generators
        ]
        self._inverse_generators = [self.invert(g) for g in self.generators]

    @abstractmethod
    def identity(self) -> Any:
        ...

    @abstractmethod
    def multiply(self, g: Any, h: Any) -> Any:
        ...

    @abstractmethod
    def invert(self, g: Any) -> Any:
        ...

    @abstractmethod
    def is_identity(self, g: Any) -> bool:
        ...

    def canonical_key(self, g: Any) -> Optional[Hashable]:
        return None

    @property
    def has_canonical_keys(self) -> bool:
        return self.canonical_key(self.identity()) is not None

    @property
    def rank(self) -> int:
        return len(self.generators)

    def equal(self, g: Any, h: Any) -> bool:
        key = self.canonical_key(g)
        if key is not None:
            return key == self.canonical_key(h)
        return self.is_identity(self.multiply(g, self.invert(h)))

    def step(self, letter: int) -> Any:
        """Generator (positive letter) or its inverse (negative letter), 1-based."""
        if letter == 0 or abs(letter) > len(self.generators):
            raise InvalidGenerator(f"generator index {letter} outside 1..{len(self.generators)}")
        if letter > 0:
            return self.generators[letter - 1]
        return self._inverse_generators[-letter - 1]

    def power(self, g: Any, exponent: int) -> Any:
        if exponent < 0:
            g = self.invert(g)
            exponent = -exponent
        result = self.identity()
        base = g
        while exponent:
            if exponent & 1:
                result = self.multiply(result, base)
            exponent >>= 1
            if exponent:
                base = self.multiply(base, base)
        return result

    def from_word(self, w: FreeWord) -> Any:
        """Evaluates a word over this backend's own generators."""
        result = self.identity()
        for letter in w.letters:
            result = self.multiply(result, self.step(letter))
        return result

    def format(self, g: Any) -> str:
        return repr(g)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name})"


class FreeBackend(GroupBackend):
    def __init__(self, k: int = 2):
        if k < 1:
            raise ConfigurationError(f"free rank must be >= 1, got {k}")
        self.k = k
        self.name = f"free{k}"
        generators = [FreeWord((i,), k) for i in range(1, k + 1)]
        names = [chr(ord("a") + i) if k <= 26 else f"x{i + 1}" for i in range(k)]
        super().__init__(generators, names)

    def identity(self) -> FreeWord:
        return identity_word(self.k)

    def multiply(self, g: FreeWord, h: FreeWord) -> FreeWord:
        return free_multiply(g, h)

    def invert(self, g: FreeWord) -> FreeWord:
        return g.inverse()

    def is_identity(self, g: FreeWord) -> bool:
        return g.is_trivial()

    def canonical_key(self, g: FreeWord) -> Hashable:
        return g.letters

    def from_word(self, w: FreeWord) -> FreeWord:
        return FreeWord(w.letters, self.k)

    def format(self, g: FreeWord) -> str:
        return str(g)


def free_backend(k: int = 2) -> FreeBackend:
    return FreeBackend(k)


# ---------------------------------------------------------------------------
# Permutations
# ---------------------------------------------------------------------------

def parse_cycles(text: str, degree: int) -> Permutation:
    """Parses 1-based cycle notation such as ``(1 2 3)(4 5)``.

    Cycles are composed left to right, matching the right action used by
    every permutation backend.
    """
    compact = text.strip()
    if compact in ("", "()", "1", "e"):
        return Permutation(list(range(degree)))
    if _CYCLE.sub("", compact).strip():
        raise MalformedCycle(f"cannot parse cycle notation {text!r}")
    result = Permutation(list(range(degree)))
    for body in _CYCLE.findall(compact):
        tokens = body.replace(",", " ").split()
        try:
            points = [int(token) for token in tokens]
        except ValueError:
            raise MalformedCycle(f"non-integer point in cycle ({body})")
        if len(set(points)) != len(points):
            raise MalformedCycle(f"repeated point in cycle ({body})")
        if any(point < 1 or point > degree for point in points):
            raise MalformedCycle(f"cycle ({body}) leaves 1..{degree}")
        if len(points) > 1:
            result = result * Permutation([[point - 1 for point in points]], size=degree)
    return result


def format_cycles(p: Permutation) -> str:
    cycles = p.cyclic_form
    if not cycles:
        return "()"
    return "".join("(" + " ".join(str(point + 1) for point in cycle) + ")" for cycle in cycles)


def n_cycle(degree: int) -> Permutation:
    return Permutation([list(range(degree))], size=degree) if degree > 1 else Permutation([0])


class SymBackend(GroupBackend):
    """Sym(N) acting on the right: ``multiply(g, h)`` applies g first."""

    def __init__(self, degree: int, generators: Optional[Iterable[Any]] = None, name: Optional[str] = None):
        if degree < 1:
            raise ConfigurationError(f"symmetric degree must be >= 1, got {degree}")
        self.degree = degree
        self.name = name or f"sym{degree}"
        if generators is None:
            if degree == 1:
                perms = [Permutation([0])]
            elif degree == 2:
                perms = [Permutation([1, 0])]
            else:
                perms = [parse_cycles("(1 2)", degree), n_cycle(degree)]
        else:
            perms = [g if isinstance(g, Permutation) else parse_cycles(g, degree) for g in generators]
        for p in perms:
            if p.size != degree:
                raise ConfigurationError(f"generator {p} does not act on {degree} points")
        super().__init__(perms, [format_cycles(p) for p in perms])

    def identity(self) -> Permutation:
        return Permutation(list(range(self.degree)))

    def multiply(self, g: Permutation, h: Permutation) -> Permutation:
        return g * h

    def invert(self, g: Permutation) -> Permutation:
        return ~g

    def is_identity(self, g: Permutation) -> bool:
        return g.is_Identity

    def canonical_key(self, g: Permutation) -> Hashable:
        return tuple(g.array_form)

    def format(self, g: Permutation) -> str:
        return format_cycles(g)


def sym_backend(degree: int, generators: Optional[Iterable[Any]] = None) -> SymBackend:
    return SymBackend(degree, generators)


def dihedral_backend(n: int) -> SymBackend:
    """The dihedral group of the n-gon, generated by a rotation and a reflection."""
    if n < 3:
        raise ConfigurationError(f"dihedral backend needs n >= 3, got {n}")
    reflection = Permutation([(n - i) % n for i in range(n)])
    return SymBackend(n, [n_cycle(n), reflection], name=f"dihedral{n}")


# ---------------------------------------------------------------------------
# Direct sums of symmetric groups
# ---------------------------------------------------------------------------

DirectSumElement = Tuple[Tuple[int, Permutation], ...]


def dsum_component(degree: int, p: Permutation) -> DirectSumElement:
    """The element of the direct sum supported on the single component Sym(degree)."""
    if p.is_Identity:
        return ()
    return ((degree, p),)


class DirectSumBackend(GroupBackend):
    """Finitely supported sums of permutations; component n lives in Sym(n)."""

    def __init__(self, max_component: int, generators: Optional[Sequence[DirectSumElement]] = None):
        if max_component < 2:
            raise ConfigurationError(f"direct sum needs a component of degree >= 2, got {max_component}")
        self.max_component = max_component
        self.name = f"dsum{max_component}"
        if generators is None:
            transpositions = tuple(
                (n, parse_cycles("(1 2)", n)) for n in range(2, max_component + 1)
            )
            cycles = tuple((n, n_cycle(n)) for n in range(2, max_component + 1))
            generators = [transpositions, cycles]
        names = [self.format(g) for g in generators]
        super().__init__(list(generators), names)

    def identity(self) -> DirectSumElement:
        return ()

    def multiply(self, g: DirectSumElement, h: DirectSumElement) -> DirectSumElement:
        components = dict(g)
        for degree, p in h:
            current = components.get(degree)
            product = p if current is None else current * p
            if product.is_Identity:
                components.pop(degree, None)
            else:
                components[degree] = product
        return tuple(sorted(components.items(), key=lambda item: item[0]))

    def invert(self, g: DirectSumElement) -> DirectSumElement:
        return tuple((degree, ~p) for degree, p in g)

    def is_identity(self, g: DirectSumElement) -> bool:
        return not g

    def canonical_key(self, g: DirectSumElement) -> Hashable:
        return tuple((degree, tuple(p.array_form)) for degree, p in g)

    def component(self, g: DirectSumElement, degree: int) -> Permutation:
        for d, p in g:
            if d == degree:
                return p
        return Permutation(list(range(degree)))

    def format(self, g: DirectSumElement) -> str:
        if not g:
            return "()"
        return " + ".join(f"[{degree}]{format_cycles(p)}" for degree, p in g)


def dsum_backend(max_component: int, generators: Optional[Sequence[DirectSumElement]] = None) -> DirectSumBackend:
    return DirectSumBackend(max_component, generators)


# ---------------------------------------------------------------------------
# Orders
# ---------------------------------------------------------------------------

def order(g: Any, backend: GroupBackend, budget: int = 10_000, two_group: bool = False) -> int:
    """Least m >= 1 with g^m = e.

    With ``two_group`` the element is assumed to have 2-power order and the
    search squares repeatedly, so ``budget`` counts squarings. Otherwise it
    counts multiplications. Running out raises BudgetExceeded.
    """
    if backend.is_identity(g):
        return 1
    if two_group:
        h = g
        for k in range(1, budget + 1):
            h = backend.multiply(h, h)
            if backend.is_identity(h):
                return 2 ** k
        raise BudgetExceeded(budget, "order by squaring")
    h = g
    for m in range(2, budget + 2):
        h = backend.multiply(h, g)
        if backend.is_identity(h):
            return m
    logger.debug(f"Order of {backend.format(g)} exceeds {budget} in {backend.name}")
    raise BudgetExceeded(budget, "order")


def elements(backend: GroupBackend, max_size: int = 100_000) -> List[Any]:
    """All elements of a finite backend, in ball order."""
    from .engine import saturate

    return saturate(backend, max_size).elements()


def make_backend(name: str) -> GroupBackend:
    """Backend by CLI name: freeK, symN, dihedralN, wreathN, grig or thompson."""
    if name.startswith("free") and name[4:].isdigit():
        return FreeBackend(int(name[4:]))
    if name.startswith("sym") and name[3:].isdigit():
        return SymBackend(int(name[3:]))
    if name.startswith("dihedral") and name[8:].isdigit():
        return dihedral_backend(int(name[8:]))
    if name.startswith("wreath") and name[6:].isdigit():
        from .wreath import WreathBackend

        return WreathBackend(int(name[6:]))
    if name == "grig":
        from .grigorchuk import GrigorchukBackend

        return GrigorchukBackend()
    if name == "thompson":
        from .thompson import ThompsonBackend

        return ThompsonBackend()
    raise ConfigurationError(f"unknown group {name!r}")
