import pytest
from sympy.combinatorics import Permutation

from lawbench.error_handler import BudgetExceeded, ConfigurationError, InvalidGenerator, MalformedCycle
from lawbench.groups import (
    DirectSumBackend,
    FreeBackend,
    SymBackend,
    dihedral_backend,
    dsum_backend,
    dsum_component,
    elements,
    format_cycles,
    free_backend,
    make_backend,
    n_cycle,
    order,
    parse_cycles,
    sym_backend,
)
from lawbench.thompson import ThompsonBackend
from lawbench.wreath import WreathBackend, wreath_backend
from lawbench.grigorchuk import GrigorchukBackend


class TestParseCycles:
    def test_identity_spellings(self):
        for text in ("", "()", "1", "e"):
            assert parse_cycles(text, 4).is_Identity

    def test_single_cycle(self):
        p = parse_cycles("(1 2 3)", 4)
        assert p.array_form == [1, 2, 0, 3]
        assert format_cycles(p) == "(1 2 3)"

    def test_cycles_compose_left_to_right(self):
        # (1 2) first, then (2 3): 1 -> 2 -> 3
        p = parse_cycles("(1 2)(2 3)", 3)
        assert p(0) == 2

    def test_commas_accepted(self):
        assert parse_cycles("(1,2)", 2) == parse_cycles("(1 2)", 2)

    @pytest.mark.parametrize("text", ["(1 2", "(1 1)", "(1 5)", "(0 1)", "(a b)", "1 2"])
    def test_malformed(self, text):
        with pytest.raises(MalformedCycle):
            parse_cycles(text, 4)


def test_sym_backend_right_action(sym3):
    a, b = sym3.generators
    assert format_cycles(a) == "(1 2)"
    assert format_cycles(b) == "(1 2 3)"
    # a first: 1 -> 2 -> 3
    assert sym3.multiply(a, b)(0) == 2
    assert sym3.involutions == [True, False]
    assert sym3.is_identity(sym3.multiply(b, sym3.invert(b)))


def test_sym_backend_small_degrees():
    assert len(SymBackend(1).generators) == 1
    assert SymBackend(2).generators[0].array_form == [1, 0]
    with pytest.raises(ConfigurationError):
        SymBackend(0)
    with pytest.raises(ConfigurationError):
        SymBackend(3, [Permutation([1, 0])])


def test_custom_generators_from_cycle_text():
    backend = SymBackend(4, ["(1 2)", "(1 2 3 4)"])
    assert len(elements(backend)) == 24


@pytest.mark.parametrize("degree, size", [(1, 1), (2, 2), (3, 6), (4, 24)])
def test_symmetric_group_sizes(degree, size):
    assert len(elements(SymBackend(degree))) == size


def test_dihedral(d4):
    rotation, reflection = d4.generators
    assert len(elements(d4)) == 8
    assert order(rotation, d4) == 4
    assert order(reflection, d4) == 2
    # r s r s = e
    rs = d4.multiply(rotation, reflection)
    assert d4.is_identity(d4.multiply(rs, rs))
    with pytest.raises(ConfigurationError):
        dihedral_backend(2)


def test_order_and_budget(sym3):
    a, b = sym3.generators
    assert order(sym3.identity(), sym3) == 1
    assert order(a, sym3) == 2
    assert order(b, sym3) == 3
    assert order(n_cycle(7), SymBackend(7)) == 7
    with pytest.raises(BudgetExceeded):
        order(n_cycle(7), SymBackend(7), budget=3)


def test_order_by_squaring(d4):
    rotation = d4.generators[0]
    assert order(rotation, d4, two_group=True) == 4


def test_power_and_from_word(sym3, word):
    b = sym3.generators[1]
    assert sym3.power(b, 3) == sym3.identity()
    assert sym3.power(b, -1) == sym3.invert(b)
    assert sym3.from_word(word("bbb")) == sym3.identity()
    with pytest.raises(InvalidGenerator):
        sym3.step(3)


def test_equal_uses_canonical_keys(sym3):
    a, b = sym3.generators
    assert sym3.has_canonical_keys
    assert sym3.equal(sym3.multiply(b, b), sym3.invert(b))
    assert not sym3.equal(a, b)


def test_free_backend(free2, word):
    a, b = free2.generators
    assert free2.multiply(a, free2.invert(a)).is_trivial()
    assert free2.canonical_key(free2.from_word(word("abAB"))) == (1, 2, -1, -2)
    assert free2.rank == 2
    assert free2.involutions == [False, False]
    with pytest.raises(ConfigurationError):
        FreeBackend(0)


class TestDirectSum:
    def test_components_are_independent(self):
        backend = DirectSumBackend(5)
        g = dsum_component(3, n_cycle(3))
        h = dsum_component(5, n_cycle(5))
        assert backend.multiply(g, h) == backend.multiply(h, g)
        assert order(backend.multiply(g, h), backend) == 15

    def test_identity_components_dropped(self):
        backend = DirectSumBackend(4)
        g = dsum_component(4, n_cycle(4))
        assert backend.is_identity(backend.multiply(g, backend.invert(g)))
        assert dsum_component(4, Permutation(list(range(4)))) == ()

    def test_component_lookup(self):
        backend = DirectSumBackend(4)
        g = dsum_component(3, n_cycle(3))
        assert backend.component(g, 3) == n_cycle(3)
        assert backend.component(g, 4).is_Identity
        assert backend.format(g) == "[3](1 2 3)"
        assert backend.format(()) == "()"

    def test_default_generators(self):
        backend = DirectSumBackend(3)
        transpositions, cycles = backend.generators
        assert [degree for degree, _ in transpositions] == [2, 3]
        assert backend.component(cycles, 3) == n_cycle(3)

    def test_needs_degree_two(self):
        with pytest.raises(ConfigurationError):
            DirectSumBackend(1)


@pytest.mark.parametrize("name, kind", [
    ("free2", FreeBackend),
    ("sym5", SymBackend),
    ("dihedral4", SymBackend),
    ("wreath2", WreathBackend),
    ("grig", GrigorchukBackend),
    ("thompson", ThompsonBackend),
])
def test_make_backend(name, kind):
    assert isinstance(make_backend(name), kind)


@pytest.mark.parametrize("name", ["free", "symmetric", "lamplighter", "wreathX"])
def test_make_backend_unknown(name):
    with pytest.raises(ConfigurationError):
        make_backend(name)


def test_factories():
    assert free_backend(3).rank == 3
    assert sym_backend(4).name == SymBackend(4).name
    dsum = dsum_backend(4)
    assert isinstance(dsum, DirectSumBackend)
    assert dsum.max_component == 4
    assert wreath_backend(2).n == 2
