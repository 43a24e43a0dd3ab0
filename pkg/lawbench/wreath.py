"""Iterated wreath products W_n of C_2 acting on the binary tree.

An element is a portrait: one bit per internal node of the tree of depth
n+1, stored level by level in heap order (node u at level j has children
2u and 2u+1 at level j+1; level j starts at offset 2^j - 1). A set bit
swaps the two subtrees below its node. Elements act on the right.
"""

import itertools
import random
from dataclasses import dataclass
from typing import Dict, Hashable, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from cachetools import LRUCache, cached
from loguru import logger

from .error_handler import BudgetExceeded, CertificateFailure, ConfigurationError, NotFoundWithin
from .groups import GroupBackend
from .monitoring import monitor
from .engine import Ball, saturate
from .words import FreeWord, enumerate_reduced, evaluate, format_word

Portrait = bytes

MAX_EXACT_LENGTH_LEVEL = 3
MAX_ENUMERATION_LEVEL = 3


def portrait_size(n: int) -> int:
    return 2 ** (n + 1) - 1


def _offset(j: int) -> int:
    return 2 ** j - 1


def _bits(g: Portrait) -> np.ndarray:
    return np.frombuffer(g, dtype=np.uint8)


def node_images(g: Portrait, n: int) -> List[np.ndarray]:
    """Images of the vertices of every level 0..n+1 under g."""
    bits = _bits(g)
    images = [np.zeros(1, dtype=np.int64)]
    for j in range(n + 1):
        level = bits[_offset(j):_offset(j + 1)]
        current = images[-1]
        following = np.empty(2 * current.size, dtype=np.int64)
        following[0::2] = 2 * current + level
        following[1::2] = 2 * current + (1 ^ level)
        images.append(following)
    return images


class WreathBackend(GroupBackend):
    def __init__(self, n: int):
        if n < 0:
            raise ConfigurationError(f"wreath level must be >= 0, got {n}")
        if n > 20:
            raise ConfigurationError(f"W_{n} portraits need 2^{n + 1} - 1 bits; refusing n > 20")
        self.n = n
        self.name = f"wreath{n}"
        self.size = portrait_size(n)
        super().__init__([self.generator_portrait(i) for i in range(n + 1)], [f"a{i}" for i in range(n + 1)])

    def generator_portrait(self, i: int) -> Portrait:
        bits = np.zeros(self.size, dtype=np.uint8)
        bits[_offset(i)] = 1
        return bits.tobytes()

    def identity(self) -> Portrait:
        return bytes(self.size)

    def multiply(self, g: Portrait, h: Portrait) -> Portrait:
        G, H = _bits(g), _bits(h)
        images = node_images(g, self.n)
        out = np.empty(self.size, dtype=np.uint8)
        for j in range(self.n + 1):
            lo, hi = _offset(j), _offset(j + 1)
            out[lo:hi] = G[lo:hi] ^ H[lo:hi][images[j]]
        return out.tobytes()

    def invert(self, g: Portrait) -> Portrait:
        G = _bits(g)
        images = node_images(g, self.n)
        out = np.empty(self.size, dtype=np.uint8)
        for j in range(self.n + 1):
            lo = _offset(j)
            out[lo + images[j]] = G[lo:_offset(j + 1)]
        return out.tobytes()

    def is_identity(self, g: Portrait) -> bool:
        return not any(g)

    def canonical_key(self, g: Portrait) -> Hashable:
        return g

    def leaf_permutation(self, g: Portrait) -> List[int]:
        return node_images(g, self.n)[-1].tolist()

    def act(self, g: Portrait, leaf: int) -> int:
        return int(node_images(g, self.n)[-1][leaf])

    def from_indices(self, indices: Sequence[int]) -> Portrait:
        """Product a_{i_1} a_{i_2} ... for 0-based generator indices."""
        result = self.identity()
        for i in indices:
            result = self.multiply(result, self.generators[i])
        return result

    def levels(self, g: Portrait) -> List[List[int]]:
        bits = _bits(g)
        return [bits[_offset(j):_offset(j + 1)].tolist() for j in range(self.n + 1)]

    def format(self, g: Portrait) -> str:
        return "|".join("".join(str(b) for b in level) for level in self.levels(g))


def wreath_backend(n: int) -> WreathBackend:
    return WreathBackend(n)


def embed(g: Portrait, n: int) -> Portrait:
    """W_{n-1} -> W_n: the same portrait with an empty bottom level."""
    return g + bytes(2 ** (n + 1) - 2 ** n)


def leaf_index(letters: Sequence[int]) -> int:
    """Big-endian index of the leaf e_0 e_1 ... e_n."""
    index = 0
    for bit in letters:
        index = 2 * index + bit
    return index


def leaf_letters(index: int, n: int) -> Tuple[int, ...]:
    return tuple((index >> (n - i)) & 1 for i in range(n + 1))


def schreier_word(leaf: int, n: int) -> Tuple[int, ...]:
    """Generator indices of h = a_n^e_n ... a_0^e_0, which maps 0^{n+1} to the leaf."""
    letters = leaf_letters(leaf, n)
    return tuple(i for i in reversed(range(n + 1)) if letters[i])


def schreier(leaf: int, backend: WreathBackend) -> Portrait:
    return backend.from_indices(schreier_word(leaf, backend.n))


def all_elements(n: int) -> Iterator[Portrait]:
    """Every element of W_n by direct portrait enumeration."""
    if n > MAX_ENUMERATION_LEVEL:
        raise ConfigurationError(f"W_{n} has 2^{portrait_size(n)} elements; enumeration stops at n = {MAX_ENUMERATION_LEVEL}")
    for bits in itertools.product((0, 1), repeat=portrait_size(n)):
        yield bytes(bits)


@cached(cache=LRUCache(maxsize=4))
def exact_length_ball(n: int) -> Ball:
    """The whole of W_n as a ball, for exact S_n-lengths."""
    if n > MAX_EXACT_LENGTH_LEVEL:
        raise ConfigurationError(f"exact lengths in W_{n} need the whole group; limit is n = {MAX_EXACT_LENGTH_LEVEL}")
    return saturate(WreathBackend(n), 2 ** portrait_size(n) + 1)


def _reduce_involutions(indices: Sequence[int]) -> Tuple[int, ...]:
    stack: List[int] = []
    for i in indices:
        if stack and stack[-1] == i:
            stack.pop()
        else:
            stack.append(i)
    return tuple(stack)


# ---------------------------------------------------------------------------
# Law witnesses
# ---------------------------------------------------------------------------

@dataclass
class WreathWitness:
    word: FreeWord
    n: int
    words: Tuple[Tuple[int, ...], ...]
    elements: Tuple[Portrait, ...]
    points: Tuple[int, ...]
    lengths: Tuple[int, ...]
    exact_lengths: bool

    @property
    def total_length(self) -> int:
        return sum(self.lengths)

    def to_dict(self, backend: WreathBackend) -> Dict:
        return {
            "word": format_word(self.word),
            "n": self.n,
            "generators": [[f"a{i}" for i in w] for w in self.words],
            "portraits": [backend.levels(g) for g in self.elements],
            "orbit": [list(leaf_letters(p, self.n)) for p in self.points],
            "lengths": list(self.lengths),
            "exact_lengths": self.exact_lengths,
        }


def orbit_points(w: FreeWord, elements: Sequence[Portrait], backend: WreathBackend) -> List[int]:
    """Images of the leftmost leaf under the prefixes of w."""
    permutations = [np.asarray(backend.leaf_permutation(g)) for g in elements]
    inverses = []
    for p in permutations:
        inverse = np.empty_like(p)
        inverse[p] = np.arange(p.size)
        inverses.append(inverse)
    points = [0]
    for letter in w.letters:
        table = permutations[letter - 1] if letter > 0 else inverses[-letter - 1]
        points.append(int(table[points[-1]]))
    return points


def _construct(w: FreeWord, n: int) -> List[Tuple[int, ...]]:
    """Generator words (0-based indices into S_n) of a tuple separating w's prefix orbit."""
    k = w.rank
    if len(w) == 1:
        words: List[Tuple[int, ...]] = [() for _ in range(k)]
        words[abs(w.letters[0]) - 1] = (0,)
        return words
    u = w.prefix(len(w) - 1)
    inner = _construct(u, n - 1)
    smaller = WreathBackend(n - 1)
    inner_points = orbit_points(u, [smaller.from_indices(x) for x in inner], smaller)
    backend = WreathBackend(n)
    lifted = [backend.from_indices(x) for x in inner]
    points = orbit_points(w, lifted, backend)
    if len(set(points)) == len(points):
        return inner
    h = schreier_word(inner_points[-1], n - 1)
    correction = tuple(reversed(h)) + (n,) + h
    last = w.letters[-1]
    j = abs(last) - 1
    words = list(inner)
    if last > 0:
        words[j] = _reduce_involutions(correction + words[j])
    else:
        words[j] = _reduce_involutions(words[j] + correction)
    return words


@monitor("wreath", "law_witness")
def law_witness(w: FreeWord, n: int, exact_lengths: Optional[bool] = None, length_ball: Optional[Ball] = None) -> WreathWitness:
    """A tuple in W_n on which w does not vanish, of total length <= (n+1)^2.

    Requires |w| <= n+1. All |w|+1 prefix-orbit points of the leftmost leaf
    are pairwise distinct.
    """
    if w.is_trivial():
        raise ConfigurationError("law witnesses need a nontrivial word")
    if len(w) > n + 1:
        raise ConfigurationError(f"|w| = {len(w)} exceeds n + 1 = {n + 1}")
    backend = WreathBackend(n)
    words = _construct(w, n)
    elements = tuple(backend.from_indices(x) for x in words)
    points = orbit_points(w, elements, backend)
    if len(set(points)) != len(points):
        raise CertificateFailure(f"prefix orbit of {format_word(w)} in W_{n} repeats a point")
    if backend.is_identity(evaluate(w, elements, backend)):
        raise CertificateFailure(f"{format_word(w)} vanished on its witness in W_{n}")
    if exact_lengths is None:
        exact_lengths = n <= MAX_EXACT_LENGTH_LEVEL
    if exact_lengths:
        length_ball = length_ball or exact_length_ball(n)
        lengths = tuple(length_ball.length_of(g) for g in elements)
    else:
        lengths = tuple(len(x) for x in words)
    if sum(lengths) > (n + 1) ** 2:
        raise CertificateFailure(f"witness for {format_word(w)} has length {sum(lengths)} > {(n + 1) ** 2}")
    return WreathWitness(w, n, tuple(words), elements, tuple(points), lengths, exact_lengths)


# ---------------------------------------------------------------------------
# Shortest laws
# ---------------------------------------------------------------------------

def _vanishes_on(w: FreeWord, tuples: Iterator[Sequence[Portrait]], backend: WreathBackend) -> bool:
    return all(backend.is_identity(evaluate(w, t, backend)) for t in tuples)


@monitor("wreath", "shortest_law")
def shortest_law(n: int, max_len: int, k: int = 2, samples: int = 64, seed: int = 0) -> FreeWord:
    """Shortest (then lexicographically least) law of W_n in F_k up to max_len."""
    backend = WreathBackend(n)
    rng = random.Random(seed)
    elements: Optional[List[Portrait]] = list(all_elements(n)) if n <= 2 else None
    generators = backend.generators
    probes: List[Tuple[Portrait, ...]] = [tuple(t) for t in itertools.product(generators, repeat=k)]
    for _ in range(samples):
        probes.append(
            tuple(bytes(rng.getrandbits(1) for _ in range(backend.size)) for _ in range(k))
        )
    for w in enumerate_reduced(k, max_len):
        if len(w) <= n + 1:
            law_witness(w, n, exact_lengths=False)
            continue
        if not _vanishes_on(w, iter(probes), backend):
            continue
        if elements is None:
            raise BudgetExceeded(len(probes), f"refuting {format_word(w)} in W_{n}")
        if _vanishes_on(w, itertools.product(elements, repeat=k), backend):
            logger.info(f"Shortest law of W_{n} in F_{k}: {format_word(w)}")
            return w
    raise NotFoundWithin(max_len, f"law of W_{n} in F_{k}")
