"""The first Grigorchuk group as a contracting self-similar backend.

Generators act on the binary tree on the right:
    a swaps the two subtrees,  b = (a, c),  c = (a, d),  d = (e, b).
Elements are canonical portraits: finite binary trees whose leaves are
nucleus elements {e, a, b, c, d} and whose internal nodes carry an
activity bit. Portraits are hash-consed, so equal elements are the same
object.
"""

import math
import random
from dataclasses import dataclass, field
from typing import Any, Dict, Hashable, List, Optional, Sequence, Tuple

from cachetools import LRUCache, cached
from loguru import logger

from .config import EntryStatus
from .engine import Ball, GrowthTable, complexity, measured_constant, saturate
from .error_handler import BudgetExceeded, CertificateFailure, ConfigurationError
from .groups import GroupBackend, order as element_order
from .monitoring import monitor
from .words import FreeWord, evaluate, format_word
from .wreath import WreathBackend, law_witness

GrigWord = str


class Node:
    __slots__ = ("act", "left", "right", "label", "depth")

    def __init__(self, act: int, left: Optional["Node"], right: Optional["Node"], label: str = "", depth: int = 0):
        self.act = act
        self.left = left
        self.right = right
        self.label = label
        self.depth = depth

    @property
    def is_leaf(self) -> bool:
        return bool(self.label)

    def __repr__(self) -> str:
        if self.label:
            return self.label
        return f"{'s' if self.act else ''}({self.left!r}, {self.right!r})"


E = Node(0, None, None, "e")
A = Node(1, None, None, "a")
B = Node(0, None, None, "b")
C = Node(0, None, None, "c")
D = Node(0, None, None, "d")

LEAVES: Dict[str, Node] = {"e": E, "a": A, "b": B, "c": C, "d": D}
_ROWS: Dict[str, Tuple[int, Node, Node]] = {
    "e": (0, E, E),
    "a": (1, E, E),
    "b": (0, A, C),
    "c": (0, A, D),
    "d": (0, E, B),
}
_KLEIN = {("b", "c"): "d", ("c", "b"): "d", ("c", "d"): "b", ("d", "c"): "b", ("b", "d"): "c", ("d", "b"): "c"}
_WORD_SECTIONS = {"b": ("a", "c"), "c": ("a", "d"), "d": ("", "b")}

# Hash-consing table. Entries are never evicted: the id-keyed caches on mul
# and inv are only sound while every interned node stays alive, so the table
# grows with the number of distinct portraits built in the process.
_INTERN: Dict[Tuple[int, int, int], Node] = {}


def interned_count() -> int:
    return len(_INTERN)


def node(act: int, left: Node, right: Node) -> Node:
    """The canonical portrait with the given activity and sections."""
    for label, (row_act, row_left, row_right) in _ROWS.items():
        if act == row_act and left is row_left and right is row_right:
            return LEAVES[label]
    key = (act, id(left), id(right))
    existing = _INTERN.get(key)
    if existing is None:
        existing = Node(act, left, right, depth=1 + max(left.depth, right.depth))
        _INTERN[key] = existing
    return existing


def sections(g: Node) -> Tuple[int, Node, Node]:
    """(activity, g_0, g_1)."""
    if g.label:
        return _ROWS[g.label]
    return g.act, g.left, g.right


@cached(cache=LRUCache(maxsize=2 ** 20), key=lambda g, h: (id(g), id(h)))
def mul(g: Node, h: Node) -> Node:
    if g is E:
        return h
    if h is E:
        return g
    if g.label and h.label:
        if g is h:
            return E
        klein = _KLEIN.get((g.label, h.label))
        if klein:
            return LEAVES[klein]
    g_act, g0, g1 = sections(g)
    h_act, h0, h1 = sections(h)
    if g_act:
        return node(g_act ^ h_act, mul(g0, h1), mul(g1, h0))
    return node(h_act, mul(g0, h0), mul(g1, h1))


@cached(cache=LRUCache(maxsize=2 ** 18), key=lambda g: id(g))
def inv(g: Node) -> Node:
    if g.label:
        return g
    if g.act:
        return node(1, inv(g.right), inv(g.left))
    return node(0, inv(g.left), inv(g.right))


def power(g: Node, exponent: int) -> Node:
    if exponent < 0:
        g, exponent = inv(g), -exponent
    result, base = E, g
    while exponent:
        if exponent & 1:
            result = mul(result, base)
        exponent >>= 1
        if exponent:
            base = mul(base, base)
    return result


def commutator(g: Node, h: Node) -> Node:
    """[g, h] = g^-1 h^-1 g h."""
    return mul(mul(inv(g), inv(h)), mul(g, h))


def portrait(word: GrigWord) -> Node:
    """Portrait of a word over a, b, c, d, multiplied divide and conquer."""
    if not word:
        return E
    if len(word) == 1:
        try:
            return LEAVES[word]
        except KeyError:
            raise ConfigurationError(f"{word!r} is not a generator of the Grigorchuk group")
    middle = len(word) // 2
    return mul(portrait(word[:middle]), portrait(word[middle:]))


def section_at(g: Node, vertex: Sequence[int]) -> Node:
    for bit in vertex:
        _, left, right = sections(g)
        g = right if bit else left
    return g


def level_sections(g: Node, n: int) -> Optional[List[Node]]:
    """Sections at the 2^n vertices of level n, or None when g is not in Stab(n)."""
    current = [g]
    for _ in range(n):
        following: List[Node] = []
        for s in current:
            act, left, right = sections(s)
            if act:
                return None
            following.extend((left, right))
        current = following
    return current


def in_stabilizer(g: Node, n: int) -> bool:
    return level_sections(g, n) is not None


def in_rigid_stabilizer(g: Node, vertex: Sequence[int]) -> bool:
    """True if g fixes level |v| and acts trivially outside the subtree at v."""
    found = level_sections(g, len(vertex))
    if found is None:
        return False
    target = 0
    for bit in vertex:
        target = 2 * target + bit
    return all(s is E for i, s in enumerate(found) if i != target)


def to_json(g: Node) -> Any:
    if g.label:
        return g.label
    return {"act": g.act, "sections": [to_json(g.left), to_json(g.right)]}


# ---------------------------------------------------------------------------
# Words
# ---------------------------------------------------------------------------

def normal_form(word: GrigWord) -> GrigWord:
    """Reduction by a^2 = b^2 = c^2 = d^2 = e and bc = cb = d, cd = dc = b, bd = db = c."""
    stack: List[str] = []
    for letter in word:
        if letter not in "abcd":
            raise ConfigurationError(f"{letter!r} is not a generator of the Grigorchuk group")
        if letter == "a":
            if stack and stack[-1] == "a":
                stack.pop()
            else:
                stack.append(letter)
        elif stack and stack[-1] != "a":
            top = stack.pop()
            if top != letter:
                stack.append(_KLEIN[(top, letter)])
        else:
            stack.append(letter)
    return "".join(stack)


def word_inverse(word: GrigWord) -> GrigWord:
    return word[::-1]


def word_sections(word: GrigWord) -> Tuple[int, GrigWord, GrigWord]:
    """(activity, section word at 0, section word at 1)."""
    parts: Tuple[List[str], List[str]] = ([], [])
    for start in (0, 1):
        position = start
        for letter in word:
            if letter == "a":
                position ^= 1
            else:
                parts[start].append(_WORD_SECTIONS[letter][position])
    return word.count("a") % 2, "".join(parts[0]), "".join(parts[1])


@cached(cache=LRUCache(maxsize=2 ** 16))
def _is_identity_nf(word: GrigWord) -> bool:
    if not word:
        return True
    if word.count("a") % 2:
        return False
    if len(word) <= 2:
        return False
    _, left, right = word_sections(word)
    return _is_identity_nf(normal_form(left)) and _is_identity_nf(normal_form(right))


def is_identity_word(word: GrigWord) -> bool:
    """The contraction algorithm for the word problem."""
    return _is_identity_nf(normal_form(word))


def to_grig_word(w: FreeWord) -> GrigWord:
    """Reads a free word over the backend letters as a word over a, b, c, d."""
    return "".join("abcd"[abs(letter) - 1] for letter in w.letters)


class GrigorchukBackend(GroupBackend):
    name = "grig"

    def __init__(self):
        super().__init__([A, B, C, D], ["a", "b", "c", "d"])

    def identity(self) -> Node:
        return E

    def multiply(self, g: Node, h: Node) -> Node:
        return mul(g, h)

    def invert(self, g: Node) -> Node:
        return inv(g)

    def is_identity(self, g: Node) -> bool:
        return g is E

    def canonical_key(self, g: Node) -> Hashable:
        return g

    def from_word(self, w: FreeWord) -> Node:
        return portrait(to_grig_word(w))

    def format(self, g: Node) -> str:
        return repr(g)


# ---------------------------------------------------------------------------
# Orders and torsion growth
# ---------------------------------------------------------------------------

def is_power_of_two(value: int) -> bool:
    return value > 0 and value & (value - 1) == 0


@monitor("grigorchuk", "torsion_growth")
def torsion_growth(n: int, budget: int = 4096) -> GrowthTable:
    """pi(1..n) from exact orders, each checked to be a power of two."""
    backend = GrigorchukBackend()
    the_ball = Ball(backend).grow_to(n)
    table = GrowthTable("torsion", backend.name, metadata={"budget": budget})
    current, status = 1, EntryStatus.EXACT
    ratio = 0.0
    for j in range(1, n + 1):
        for entry in the_ball.stratum(j):
            try:
                o = element_order(entry.element, backend, budget)
            except BudgetExceeded:
                current, status = max(current, budget + 1), EntryStatus.LOWER_BOUND
                continue
            if not is_power_of_two(o):
                raise CertificateFailure(f"element {entry.word} has order {o}, not a power of two")
            current = max(current, o)
            ratio = max(ratio, o / j ** 1.5)
        table.add(j, current, status)
    table.metadata["ball_sizes"] = [len(the_ball.upto(j)) for j in range(0, n + 1)]
    table.metadata["order_over_length_3_2"] = ratio
    table.metadata["interned_portraits"] = interned_count()
    logger.info(f"Grigorchuk torsion growth: {table.values()}")
    return table


@monitor("grigorchuk", "power_complexity")
def power_complexity(m: int, budget: int = 12, the_ball: Optional[Ball] = None) -> int:
    """Least length of g with g^(2^m) != e."""
    if m < 0:
        raise ConfigurationError(f"m must be >= 0, got {m}")
    backend = GrigorchukBackend()
    the_ball = the_ball or Ball(backend)
    for length in range(1, budget + 1):
        for entry in the_ball.stratum(length):
            g = entry.element
            for _ in range(m):
                g = mul(g, g)
            if g is not E:
                return length
    raise BudgetExceeded(budget, f"complexity of x^{2 ** m} in the Grigorchuk group")


def power_complexity_engine(m: int, budget: int = 12) -> int:
    """The same value through the generic complexity engine."""
    return complexity(GrigorchukBackend(), FreeWord((1,) * 2 ** m, 1), budget)


def lower_bound_table(m_max: int, budget: int = 12) -> GrowthTable:
    """Rows A(2^m) >= chi(x^{2^m}) for m = 0..m_max."""
    backend = GrigorchukBackend()
    the_ball = Ball(backend)
    table = GrowthTable("power_lower_bound", backend.name, metadata={"budget": budget})
    for m in range(0, m_max + 1):
        try:
            table.add(2 ** m, power_complexity(m, budget, the_ball))
        except BudgetExceeded:
            table.add(2 ** m, budget + 1, EntryStatus.LOWER_BOUND)
    return table


# ---------------------------------------------------------------------------
# The elements y_n
# ---------------------------------------------------------------------------

X_WORD = "abab"


@dataclass
class YCertificate:
    n: int
    length: int
    loose_bound: Optional[int]
    tight_bound: Optional[int]
    tight_bound_holds: Optional[bool]


class YSequence:
    """y_0 = abab, y_1 = (y_0, e) found by breadth-first search,
    y_n = [y_{n-1}, y_{n-2}] = (y_{n-1}, e)."""

    def __init__(self, y1_budget: int = 10):
        self.y1_budget = y1_budget
        self._words: List[GrigWord] = [X_WORD]
        self._portraits: List[Node] = [portrait(X_WORD)]
        self.certificates: List[YCertificate] = [YCertificate(0, len(X_WORD), None, None, None)]

    @property
    def x(self) -> Node:
        return self._portraits[0]

    def _find_y1(self) -> None:
        backend = GrigorchukBackend()
        target = node(0, self.x, E)
        the_ball = Ball(backend)
        for radius in range(1, self.y1_budget + 1):
            the_ball.grow_to(radius)
            entry = the_ball.find(target)
            if entry is not None:
                word = normal_form("".join("abcd"[abs(s) - 1] for s in entry.word))
                logger.info(f"y_1 = {word} (length {len(word)})")
                self._words.append(word)
                self._portraits.append(target)
                self.certificates.append(YCertificate(1, len(word), None, None, None))
                return
        raise ConfigurationError(f"no word of length <= {self.y1_budget} has sections (x, e)")

    def _extend(self) -> None:
        if len(self._words) == 1:
            self._find_y1()
            return
        n = len(self._words)
        previous, before = self._words[n - 1], self._words[n - 2]
        word = normal_form(word_inverse(previous) + word_inverse(before) + previous + before)
        self._words.append(word)
        self._portraits.append(commutator(self._portraits[n - 1], self._portraits[n - 2]))
        loose = 2 * len(previous) + 2 * len(before)
        tight = 2 * len(previous) + len(before)
        if len(word) > tight:
            raise CertificateFailure(f"|y_{n}| = {len(word)} exceeds 2|y_{n - 1}| + |y_{n - 2}| = {tight}")
        self.certificates.append(YCertificate(n, len(word), loose, tight, len(word) <= tight))

    def _ensure(self, n: int) -> None:
        if n < 0:
            raise ConfigurationError(f"y_n needs n >= 0, got {n}")
        while len(self._words) <= n:
            self._extend()

    def word(self, n: int) -> GrigWord:
        self._ensure(n)
        return self._words[n]

    def portrait(self, n: int) -> Node:
        self._ensure(n)
        return self._portraits[n]

    def length(self, n: int) -> int:
        return len(self.word(n))

    def certify(self, n: int) -> bool:
        """y_n lies in rst(0^n) with section x at 0^n."""
        g = self.portrait(n)
        vertex = (0,) * n
        if not in_rigid_stabilizer(g, vertex):
            raise CertificateFailure(f"y_{n} is not in the rigid stabilizer of 0^{n}")
        if section_at(g, vertex) is not self.x:
            raise CertificateFailure(f"y_{n} does not have section x at 0^{n}")
        return True

    def growth_constant(self, n: int) -> float:
        """max |y_j| / (1 + sqrt 3)^j for j <= n."""
        return max(self.length(j) / (1 + math.sqrt(3)) ** j for j in range(0, n + 1))


_Y = YSequence()


def y(n: int) -> GrigWord:
    return _Y.word(n)


def y_sequence() -> YSequence:
    return _Y


# ---------------------------------------------------------------------------
# The embedding of W_n
# ---------------------------------------------------------------------------

@dataclass
class PhiCertificate:
    n: int
    image_lengths: List[int]
    order_two: bool
    rigid: bool
    display: bool
    injective_checked: int
    homomorphism_pairs: int
    passed: bool = True
    notes: List[str] = field(default_factory=list)


class Phi:
    """W_n -> Grigorchuk group, a_i -> k_{i+1} = y_{5i}^4."""

    def __init__(self, n: int, sequence: Optional[YSequence] = None):
        if n < 0:
            raise ConfigurationError(f"Phi_n needs n >= 0, got {n}")
        self.n = n
        self.sequence = sequence or _Y
        self.images: List[Node] = [power(self.sequence.portrait(5 * i), 4) for i in range(n + 1)]

    def image_length(self, i: int) -> int:
        return 4 * self.sequence.length(5 * i)

    def image_word(self, i: int) -> GrigWord:
        return normal_form(self.sequence.word(5 * i) * 4)

    def apply_indices(self, indices: Sequence[int]) -> Node:
        result = E
        for i in indices:
            result = mul(result, self.images[i])
        return result

    def word_length(self, indices: Sequence[int]) -> int:
        return sum(self.image_length(i) for i in indices)

    def check_images(self) -> Tuple[bool, bool, bool]:
        x4 = power(self.sequence.x, 4)
        for i, k in enumerate(self.images):
            if k is E or mul(k, k) is not E:
                raise CertificateFailure(f"k_{i + 1} does not have order 2")
            vertex = (0,) * (5 * i)
            if not in_rigid_stabilizer(k, vertex) or section_at(k, vertex) is not x4:
                raise CertificateFailure(f"k_{i + 1} is not x^4 placed at 0^{5 * i}")
        for index in range(8):
            v = ((index >> 2) & 1, (index >> 1) & 1, index & 1)
            if section_at(x4, v + (0,)) is not A or section_at(x4, v + (1,)) is not C:
                raise CertificateFailure(f"x^4 has unexpected sections below {v}")
        return True, True, True

    @monitor("grigorchuk", "phi_certify")
    def certify(self, homomorphism_samples: int = 100, seed: int = 0) -> PhiCertificate:
        order_two, rigid, display = self.check_images()
        wreath = WreathBackend(self.n)
        whole = saturate(wreath, 2 ** (2 ** (self.n + 1) - 1) + 1)
        images = {}
        for entry in whole.entries:
            indices = tuple(abs(s) - 1 for s in entry.word)
            image = self.apply_indices(indices)
            if entry.length and image is E:
                raise CertificateFailure(f"Phi_{self.n} kills the nontrivial element {indices}")
            images[entry.element] = image
        entries = whole.entries
        if self.n <= 1:
            pairs = [(g, h) for g in entries for h in entries]
        else:
            rng = random.Random(seed)
            pairs = [(rng.choice(entries), rng.choice(entries)) for _ in range(homomorphism_samples)]
        for g, h in pairs:
            product = wreath.multiply(g.element, h.element)
            if images[product] is not mul(images[g.element], images[h.element]):
                raise CertificateFailure(f"Phi_{self.n} is not multiplicative on {g.word}, {h.word}")
        certificate = PhiCertificate(
            n=self.n,
            image_lengths=[self.image_length(i) for i in range(self.n + 1)],
            order_two=order_two,
            rigid=rigid,
            display=display,
            injective_checked=len(entries) - 1,
            homomorphism_pairs=len(pairs),
        )
        logger.info(f"Phi_{self.n} certified on {len(entries)} elements and {len(pairs)} pairs")
        return certificate


# ---------------------------------------------------------------------------
# Upper-bound transfer
# ---------------------------------------------------------------------------

@dataclass
class TransferWitness:
    word: str
    n: int
    wreath_lengths: List[int]
    image_lengths: List[int]
    total_image_length: int
    measured_constant: float
    bound: float


@monitor("grigorchuk", "transfer_witness")
def transfer_witness(w: FreeWord, n: int, phi: Optional[Phi] = None) -> TransferWitness:
    """Pushes a wreath witness for w through Phi_n and checks w survives."""
    phi = phi or Phi(n)
    witness = law_witness(w, n, exact_lengths=False)
    images = [phi.apply_indices(indices) for indices in witness.words]
    backend = GrigorchukBackend()
    if evaluate(w, images, backend) is E:
        raise CertificateFailure(f"{format_word(w)} vanished on the image of its wreath witness")
    image_lengths = [phi.word_length(indices) for indices in witness.words]
    constant = phi.sequence.growth_constant(5 * n)
    bound = 4 * constant * (n + 1) ** 2 * (1 + math.sqrt(3)) ** (5 * n)
    return TransferWitness(
        word=format_word(w),
        n=n,
        wreath_lengths=list(witness.lengths),
        image_lengths=image_lengths,
        total_image_length=sum(image_lengths),
        measured_constant=constant,
        bound=bound,
    )
