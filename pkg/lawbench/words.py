"""Free words, mixed words and word-map evaluation.

A free word over x_1..x_k is stored as a tuple of signed generator indices:
``i`` stands for x_i and ``-i`` for its inverse. Every FreeWord is freely
reduced, so structural equality is equality in F_k.
"""

import random
import re
from dataclasses import dataclass
from typing import Any, Iterator, List, Optional, Sequence, Tuple, TYPE_CHECKING

from .error_handler import InvalidGenerator, MalformedWord

if TYPE_CHECKING:
    from .groups import GroupBackend

_TOKEN = re.compile(r"[xX]\d+|[a-zA-Z]")


def _check_letters(letters: Sequence[int], rank: int) -> None:
    for letter in letters:
        if not isinstance(letter, int) or letter == 0 or abs(letter) > rank:
            raise InvalidGenerator(f"generator index {letter!r} outside 1..{rank}")


def _reduce_letters(letters: Sequence[int]) -> Tuple[int, ...]:
    stack: List[int] = []
    for letter in letters:
        if stack and stack[-1] == -letter:
            stack.pop()
        else:
            stack.append(letter)
    return tuple(stack)


@dataclass(frozen=True)
class FreeWord:
    letters: Tuple[int, ...]
    rank: int = 2

    def __len__(self) -> int:
        return len(self.letters)

    def length(self) -> int:
        return len(self.letters)

    def is_trivial(self) -> bool:
        return not self.letters

    def inverse(self) -> "FreeWord":
        return FreeWord(tuple(-letter for letter in reversed(self.letters)), self.rank)

    def __mul__(self, other: "FreeWord") -> "FreeWord":
        return multiply(self, other)

    def __pow__(self, exponent: int) -> "FreeWord":
        return power(self, exponent)

    def with_rank(self, rank: int) -> "FreeWord":
        """The same word viewed in F_rank (rank may only grow)."""
        if rank < self.rank and any(abs(letter) > rank for letter in self.letters):
            raise InvalidGenerator(f"word uses generators beyond rank {rank}")
        return FreeWord(self.letters, rank)

    def prefix(self, m: int) -> "FreeWord":
        return FreeWord(self.letters[:m], self.rank)

    def __str__(self) -> str:
        return format_word(self)


def identity_word(rank: int = 2) -> FreeWord:
    return FreeWord((), rank)


def reduce(letters: Sequence[int], rank: int = 2) -> FreeWord:
    """Free reduction of a raw letter sequence."""
    letters = tuple(letters)
    _check_letters(letters, rank)
    return FreeWord(_reduce_letters(letters), rank)


def generator(i: int, rank: int = 2) -> FreeWord:
    return reduce((i,), rank)


def multiply(u: FreeWord, v: FreeWord) -> FreeWord:
    a, b = u.letters, v.letters
    overlap = 0
    limit = min(len(a), len(b))
    while overlap < limit and a[len(a) - 1 - overlap] == -b[overlap]:
        overlap += 1
    return FreeWord(a[:len(a) - overlap] + b[overlap:], max(u.rank, v.rank))


def inverse(w: FreeWord) -> FreeWord:
    return w.inverse()


def power(w: FreeWord, exponent: int) -> FreeWord:
    if exponent < 0:
        return power(w.inverse(), -exponent)
    result = identity_word(w.rank)
    base = w
    while exponent:
        if exponent & 1:
            result = multiply(result, base)
        base = multiply(base, base)
        exponent >>= 1
    return result


def commutator(u: FreeWord, v: FreeWord) -> FreeWord:
    """[u, v] = u^-1 v^-1 u v."""
    return multiply(multiply(u.inverse(), v.inverse()), multiply(u, v))


def conjugate(w: FreeWord, c: FreeWord) -> FreeWord:
    """w^c = c^-1 w c."""
    return multiply(multiply(c.inverse(), w), c)


def cyclic_reduce(w: FreeWord) -> Tuple[FreeWord, FreeWord]:
    """Returns (conjugator, core) with w = conjugator * core * conjugator^-1."""
    letters = w.letters
    i, j = 0, len(letters) - 1
    while i < j and letters[i] == -letters[j]:
        i += 1
        j -= 1
    return FreeWord(letters[:i], w.rank), FreeWord(letters[i:j + 1], w.rank)


def is_cyclically_reduced(w: FreeWord) -> bool:
    return len(w) < 2 or w.letters[0] != -w.letters[-1]


def free_root(w: FreeWord) -> Tuple[FreeWord, int]:
    """Maximal e with w = root^e; the returned root is not a proper power."""
    if w.is_trivial():
        raise MalformedWord("the trivial word has no root")
    conjugator, core = cyclic_reduce(w)
    letters = core.letters
    size = len(letters)
    for period in range(1, size + 1):
        if size % period == 0 and letters == letters[:period] * (size // period):
            root = conjugate(FreeWord(letters[:period], w.rank), conjugator.inverse())
            return root, size // period
    raise AssertionError("unreachable: the full word is always a period")


def is_proper_power(w: FreeWord) -> bool:
    return not w.is_trivial() and free_root(w)[1] > 1


def _alphabet(rank: int) -> List[int]:
    alphabet: List[int] = []
    for i in range(1, rank + 1):
        alphabet.extend((i, -i))
    return alphabet


def enumerate_reduced(k: int, n: int, exact: bool = False) -> Iterator[FreeWord]:
    """Nontrivial reduced words of length <= n in nondecreasing length.

    Within one length the order is lexicographic over the alphabet
    x1 < X1 < x2 < X2 < ...
    """
    alphabet = _alphabet(k)
    lengths = [n] if exact else range(1, n + 1)
    for length in lengths:
        if length < 1:
            continue
        prefix: List[int] = []

        def extend() -> Iterator[FreeWord]:
            if len(prefix) == length:
                yield FreeWord(tuple(prefix), k)
                return
            for letter in alphabet:
                if prefix and prefix[-1] == -letter:
                    continue
                prefix.append(letter)
                yield from extend()
                prefix.pop()

        yield from extend()


def count_reduced(k: int, length: int) -> int:
    if length == 0:
        return 1
    return 2 * k * (2 * k - 1) ** (length - 1)


def ball_size(k: int, l: int) -> int:
    """Number of elements of F_k of length <= l."""
    return sum(count_reduced(k, j) for j in range(0, max(l, 0) + 1))


def random_reduced(k: int, length: int, rng: random.Random) -> FreeWord:
    alphabet = _alphabet(k)
    letters: List[int] = []
    for _ in range(length):
        choices = [a for a in alphabet if not letters or a != -letters[-1]]
        letters.append(rng.choice(choices))
    return FreeWord(tuple(letters), k)


def parse_word(text: str, rank: int = 2) -> FreeWord:
    """Parses ``abAB`` style or ``x1 x2 X1`` style words.

    ``""`` and ``"1"`` denote the empty word.
    """
    stripped = text.strip()
    if stripped in ("", "1"):
        return identity_word(rank)
    letters: List[int] = []
    position = 0
    compact = re.sub(r"\s+", "", stripped)
    for match in _TOKEN.finditer(compact):
        if match.start() != position:
            raise MalformedWord(f"unexpected text {compact[position:match.start()]!r} in {text!r}")
        token = match.group()
        if len(token) > 1:
            index = int(token[1:])
            letters.append(index if token[0] == "x" else -index)
        else:
            index = ord(token.lower()) - ord("a") + 1
            letters.append(index if token.islower() else -index)
        position = match.end()
    if position != len(compact):
        raise MalformedWord(f"unexpected text {compact[position:]!r} in {text!r}")
    return reduce(letters, rank)


def format_word(w: FreeWord) -> str:
    if w.is_trivial():
        return "1"
    if w.rank <= 26:
        return "".join(
            chr(ord("a") + abs(l) - 1) if l > 0 else chr(ord("A") + abs(l) - 1)
            for l in w.letters
        )
    return " ".join(f"x{l}" if l > 0 else f"X{-l}" for l in w.letters)


def evaluate(w: FreeWord, elements: Sequence[Any], backend: "GroupBackend") -> Any:
    """Image of w under x_i -> elements[i-1]."""
    if len(elements) != w.rank:
        raise InvalidGenerator(f"tuple of length {len(elements)} for a word of rank {w.rank}")
    inverses = {}
    result = backend.identity()
    for letter in w.letters:
        index = abs(letter) - 1
        if letter > 0:
            g = elements[index]
        else:
            g = inverses.get(index)
            if g is None:
                g = backend.invert(elements[index])
                inverses[index] = g
        result = backend.multiply(result, g)
    return result


# ---------------------------------------------------------------------------
# Mixed words: elements of Gamma * <x>
# ---------------------------------------------------------------------------

_MIXED_TOKEN = re.compile(r"<([^<>]*)>|x(?:\^(-?\d+))?|X")


@dataclass(frozen=True)
class MixedWord:
    """a_1 x^k_1 a_2 x^k_2 ... a_l x^k_l with coefficients as backend words.

    Normalized: interior coefficients are nonidentity in the backend and
    k_1..k_{l-1} are nonzero. a_1 may be the identity and k_l may be zero.
    The empty word is the identity of Gamma * <x>.
    """

    coefficients: Tuple[FreeWord, ...]
    exponents: Tuple[int, ...]

    def __len__(self) -> int:
        return self.length()

    def length(self) -> int:
        return sum(len(a) for a in self.coefficients) + sum(abs(k) for k in self.exponents)

    @property
    def syllables(self) -> int:
        return len(self.coefficients)

    def is_trivial(self) -> bool:
        return not self.coefficients

    def pairs(self) -> List[Tuple[FreeWord, int]]:
        return list(zip(self.coefficients, self.exponents))

    @classmethod
    def normalize(cls, pairs: Sequence[Tuple[FreeWord, int]], backend: "GroupBackend") -> "MixedWord":
        """Builds the normal form, merging coefficients and exponents eagerly."""
        coefficients: List[FreeWord] = []
        exponents: List[int] = []

        def is_identity(word: FreeWord) -> bool:
            return word.is_trivial() or backend.is_identity(backend.from_word(word))

        def push(a: FreeWord, k: int) -> None:
            if coefficients and exponents[-1] == 0:
                previous = coefficients.pop()
                exponents.pop()
                push(multiply(previous, a), k)
            elif coefficients and is_identity(a):
                exponents[-1] += k
            else:
                coefficients.append(a)
                exponents.append(k)

        for a, k in pairs:
            push(a, k)
        if coefficients and exponents[-1] == 0 and is_identity(coefficients[-1]):
            coefficients.pop()
            exponents.pop()
        return cls(tuple(coefficients), tuple(exponents))

    @classmethod
    def parse(cls, text: str, backend: "GroupBackend") -> "MixedWord":
        """Strict parser: rejects input that is not already in normal form."""
        rank = len(backend.generators)
        compact = re.sub(r"\s+", "", text)
        tokens: List[Tuple[str, Any]] = []
        position = 0
        for match in _MIXED_TOKEN.finditer(compact):
            if match.start() != position:
                raise MalformedWord(f"unexpected text {compact[position:match.start()]!r} in {text!r}")
            if match.group(0).startswith("<"):
                tokens.append(("coef", parse_word(match.group(1), rank)))
            elif match.group(0) == "X":
                tokens.append(("var", -1))
            else:
                tokens.append(("var", int(match.group(2)) if match.group(2) else 1))
            position = match.end()
        if position != len(compact):
            raise MalformedWord(f"unexpected text {compact[position:]!r} in {text!r}")

        pairs: List[Tuple[FreeWord, int]] = []
        expect_coefficient = True
        for kind, value in tokens:
            if kind == "coef":
                if not expect_coefficient:
                    raise MalformedWord(f"adjacent coefficients in {text!r}")
                pairs.append((value, 0))
                expect_coefficient = False
            else:
                if expect_coefficient:
                    if pairs:
                        raise MalformedWord(f"adjacent variable powers in {text!r}")
                    pairs.append((identity_word(rank), 0))
                coefficient, _ = pairs[-1]
                pairs[-1] = (coefficient, value)
                expect_coefficient = True

        for index, (coefficient, exponent) in enumerate(pairs):
            if index > 0 and (coefficient.is_trivial() or backend.is_identity(backend.from_word(coefficient))):
                raise MalformedWord(f"interior coefficient {index + 1} is the identity in {text!r}")
            if index < len(pairs) - 1 and exponent == 0:
                raise MalformedWord(f"zero interior exponent at position {index + 1} in {text!r}")
        return cls(tuple(a for a, _ in pairs), tuple(k for _, k in pairs))

    def format(self) -> str:
        parts: List[str] = []
        for a, k in self.pairs():
            if not a.is_trivial():
                parts.append(f"<{format_word(a)}>")
            if k == 1:
                parts.append("x")
            elif k != 0:
                parts.append(f"x^{k}")
        return "".join(parts) or "1"

    def __str__(self) -> str:
        return self.format()


def mixed_constant(a: FreeWord, backend: "GroupBackend") -> MixedWord:
    return MixedWord.normalize([(a, 0)], backend)


def mixed_variable(backend: "GroupBackend", exponent: int = 1) -> MixedWord:
    return MixedWord.normalize([(identity_word(len(backend.generators)), exponent)], backend)


def mixed_multiply(u: MixedWord, v: MixedWord, backend: "GroupBackend") -> MixedWord:
    return MixedWord.normalize(u.pairs() + v.pairs(), backend)


def mixed_inverse(mw: MixedWord, backend: "GroupBackend") -> MixedWord:
    if mw.is_trivial():
        return mw
    rank = len(backend.generators)
    a, k = mw.coefficients, mw.exponents
    pairs: List[Tuple[FreeWord, int]] = [(identity_word(rank), -k[-1])]
    for i in range(len(a) - 1, 0, -1):
        pairs.append((a[i].inverse(), -k[i - 1]))
    pairs.append((a[0].inverse(), 0))
    return MixedWord.normalize(pairs, backend)


def mixed_commutator_with_variable(a: FreeWord, backend: "GroupBackend") -> MixedWord:
    """[a, x] = a^-1 x^-1 a x."""
    return MixedWord.normalize([(a.inverse(), -1), (a, 1)], backend)


def substitute_free(w: FreeWord, images: Sequence[MixedWord], backend: "GroupBackend") -> MixedWord:
    """Mixed word obtained from w by y_i -> images[i-1]."""
    if len(images) != w.rank:
        raise InvalidGenerator(f"{len(images)} images for a word of rank {w.rank}")
    inverses = {}
    pairs: List[Tuple[FreeWord, int]] = []
    for letter in w.letters:
        index = abs(letter) - 1
        if letter > 0:
            image = images[index]
        else:
            image = inverses.get(index)
            if image is None:
                image = mixed_inverse(images[index], backend)
                inverses[index] = image
        pairs.extend(image.pairs())
    return MixedWord.normalize(pairs, backend)


def cyclic_normal_form(mw: MixedWord, backend: "GroupBackend") -> MixedWord:
    """Conjugate of mw (by powers of x and by its last coefficient) whose
    coefficients are all nonidentity and whose
    exponents are all nonzero, unless mw is conjugate to a pure power of x
    or to a constant."""
    current = mw
    while current.syllables > 1:
        a, k = list(current.coefficients), list(current.exponents)
        first_trivial = a[0].is_trivial() or backend.is_identity(backend.from_word(a[0]))
        if first_trivial:
            pairs = list(zip(a[1:], k[1:]))
            last_a, last_k = pairs[-1]
            pairs[-1] = (last_a, last_k + k[0])
        elif k[-1] == 0:
            pairs = [(multiply(a[-1], a[0]), k[0])] + list(zip(a[1:-1], k[1:-1]))
        else:
            break
        current = MixedWord.normalize(pairs, backend)
    return current


def substitute_mixed(
    mw: MixedWord,
    g: Any,
    backend: "GroupBackend",
    coefficient_elements: Optional[Sequence[Any]] = None,
) -> Any:
    """Evaluates a_1 g^k_1 ... a_l g^k_l in the backend."""
    if coefficient_elements is None:
        coefficient_elements = [backend.from_word(a) for a in mw.coefficients]
    result = backend.identity()
    powers = {}
    for a, k in zip(coefficient_elements, mw.exponents):
        result = backend.multiply(result, a)
        if k:
            gk = powers.get(k)
            if gk is None:
                gk = backend.power(g, k)
                powers[k] = gk
            result = backend.multiply(result, gk)
    return result
