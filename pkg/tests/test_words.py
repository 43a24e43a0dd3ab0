import random

import pytest

from lawbench.error_handler import InvalidGenerator, MalformedWord
from lawbench.groups import SymBackend
from lawbench.words import (
    FreeWord,
    MixedWord,
    ball_size,
    commutator,
    conjugate,
    count_reduced,
    cyclic_normal_form,
    cyclic_reduce,
    enumerate_reduced,
    evaluate,
    format_word,
    free_root,
    identity_word,
    is_cyclically_reduced,
    is_proper_power,
    mixed_commutator_with_variable,
    mixed_constant,
    mixed_inverse,
    mixed_multiply,
    mixed_variable,
    parse_word,
    power,
    random_reduced,
    reduce,
    substitute_free,
    substitute_mixed,
)


def test_reduce_cancels_adjacent_inverses():
    assert reduce((1, -1, 2, 1, -1, -2)).is_trivial()
    assert reduce((1, 2, -2, 2)).letters == (1, 2)


def test_reduce_rejects_bad_generators():
    with pytest.raises(InvalidGenerator):
        reduce((3,), rank=2)
    with pytest.raises(InvalidGenerator):
        reduce((0,), rank=2)


def test_multiplication_and_inverse(word):
    u, v = word("abA"), word("aBB")
    assert format_word(u * v) == "aB"
    assert (u * u.inverse()).is_trivial()
    assert power(word("ab"), -2) == word("BABA")
    assert power(word("ab"), 0).is_trivial()


def test_commutator_and_conjugate(word):
    a, b = word("a"), word("b")
    assert commutator(a, b) == word("ABab")
    assert conjugate(a, b) == word("Bab")
    assert commutator(a, a).is_trivial()


@pytest.mark.parametrize("text, conjugator, core", [
    ("abA", "a", "b"),
    ("abAB", "1", "abAB"),
    ("abaBA", "ab", "a"),
    ("a", "1", "a"),
])
def test_cyclic_reduce(word, text, conjugator, core):
    c, w = cyclic_reduce(word(text))
    assert c == word(conjugator)
    assert w == word(core)
    assert c * w * c.inverse() == word(text)
    assert is_cyclically_reduced(w)


def test_free_root(word):
    assert free_root(word("abab")) == (word("ab"), 2)
    root, exponent = free_root(word("Aa" "bbb"))
    assert exponent == 3 and root == word("b")
    assert is_proper_power(word("aaa"))
    assert not is_proper_power(word("ab"))
    with pytest.raises(MalformedWord):
        free_root(identity_word())


def test_free_root_of_conjugated_power(word):
    w = word("b") * word("aaa") * word("B")
    root, exponent = free_root(w)
    assert exponent == 3
    assert root == word("baB")


@pytest.mark.parametrize("n, expected", [(1, 4), (2, 16), (3, 52)])
def test_enumerate_reduced_counts(n, expected):
    words = list(enumerate_reduced(2, n))
    assert len(words) == expected
    assert len(set(words)) == expected
    assert ball_size(2, n) == expected + 1


def test_enumerate_reduced_order_and_exact():
    words = list(enumerate_reduced(2, 2))
    assert [format_word(w) for w in words[:4]] == ["a", "A", "b", "B"]
    lengths = [len(w) for w in words]
    assert lengths == sorted(lengths)
    exact = list(enumerate_reduced(2, 2, exact=True))
    assert len(exact) == count_reduced(2, 2) == 12
    assert all(len(w) == 2 for w in exact)


def test_random_reduced_is_reduced():
    rng = random.Random(7)
    for _ in range(20):
        w = random_reduced(2, 9, rng)
        assert len(w) == 9
        assert reduce(w.letters) == w


@pytest.mark.parametrize("text, letters", [
    ("abAB", (1, 2, -1, -2)),
    ("x1 x2 X1 X2", (1, 2, -1, -2)),
    ("a b", (1, 2)),
    ("1", ()),
    ("", ()),
    ("aA", ()),
])
def test_parse_word(text, letters):
    assert parse_word(text).letters == letters


@pytest.mark.parametrize("text", ["a+b", "ab!", "a^2"])
def test_parse_word_rejects_garbage(text):
    with pytest.raises(MalformedWord):
        parse_word(text)


def test_parse_word_rank():
    with pytest.raises(InvalidGenerator):
        parse_word("c", rank=2)
    assert parse_word("c", rank=3).letters == (3,)


def test_format_word(word):
    assert format_word(identity_word()) == "1"
    assert format_word(word("abAB")) == "abAB"
    assert format_word(FreeWord((1, -30), 30)) == "x1 X30"


def test_evaluate_in_sym3(sym3, word):
    a, b = sym3.generators
    assert evaluate(word("ab"), [a, b], sym3) == sym3.multiply(a, b)
    assert sym3.is_identity(evaluate(word("abAB"), [a, a], sym3))
    with pytest.raises(InvalidGenerator):
        evaluate(word("ab"), [a], sym3)


class TestMixedWords:
    @pytest.fixture
    def backend(self):
        return SymBackend(3)

    def test_parse_and_format(self, backend):
        mw = MixedWord.parse("<a>x<b>X", backend)
        assert mw.coefficients == (parse_word("a"), parse_word("b"))
        assert mw.exponents == (1, -1)
        assert mw.format() == "<a>x<b>x^-1"
        assert mw.length() == 4

    def test_leading_variable(self, backend):
        mw = MixedWord.parse("x^2<a>", backend)
        assert mw.coefficients[0].is_trivial()
        assert mw.exponents == (2, 0)

    @pytest.mark.parametrize("text", ["<a><b>", "xx", "<a>x<aa>x", "<a>x<b"])
    def test_parse_rejects_non_normal(self, backend, text):
        # <aa> is the identity in Sym(3) since a is a transposition
        with pytest.raises(MalformedWord):
            MixedWord.parse(text, backend)

    def test_normalize_merges(self, backend):
        a = parse_word("a")
        mw = MixedWord.normalize([(a, 0), (a, 1)], backend)
        assert mw.syllables == 1
        assert mw.exponents == (1,)
        assert MixedWord.normalize([(identity_word(), 0)], backend).is_trivial()

    def test_constants(self, backend):
        b = mixed_constant(parse_word("b"), backend)
        assert b.exponents == (0,)
        assert mixed_multiply(b, mixed_variable(backend), backend).format() == "<b>x"
        assert mixed_constant(parse_word("aa"), backend).is_trivial()

    def test_inverse(self, backend):
        mw = MixedWord.parse("<a>x<b>x^2", backend)
        product = mixed_multiply(mw, mixed_inverse(mw, backend), backend)
        assert product.is_trivial()

    def test_commutator_with_variable(self, backend):
        mw = mixed_commutator_with_variable(parse_word("a"), backend)
        assert mw.format() == "<A>x^-1<a>x"

    def test_substitute_free(self, backend):
        x = mixed_variable(backend)
        image = substitute_free(parse_word("aa"), [x, x], backend)
        assert image.format() == "x^2"

    def test_substitute_mixed(self, backend):
        mw = MixedWord.parse("<a>x<b>X", backend)
        g = backend.generators[1]
        a, b = backend.generators
        expected = backend.multiply(
            backend.multiply(backend.multiply(a, g), b), backend.invert(g)
        )
        assert substitute_mixed(mw, g, backend) == expected

    def test_cyclic_normal_form(self, backend):
        mw = MixedWord.parse("x<a>x<b>", backend)
        cyclic = cyclic_normal_form(mw, backend)
        assert all(not a.is_trivial() for a in cyclic.coefficients)
        assert all(k != 0 for k in cyclic.exponents)
        assert cyclic.syllables == 2
