import pytest

from lawbench.error_handler import ConfigurationError, NotFoundWithin
from lawbench.words import enumerate_reduced, evaluate, format_word
from lawbench.wreath import (
    WreathBackend,
    all_elements,
    embed,
    exact_length_ball,
    law_witness,
    leaf_index,
    leaf_letters,
    orbit_points,
    portrait_size,
    schreier,
    shortest_law,
)


class TestBackend:
    def test_sizes(self, wreath2):
        assert portrait_size(0) == 1
        assert portrait_size(2) == 7
        assert len(wreath2.generators) == 3
        assert all(wreath2.involutions)

    def test_right_action(self, wreath2):
        a0, a1, a2 = wreath2.generators
        g = wreath2.multiply(a0, a1)
        for leaf in range(8):
            assert wreath2.act(g, leaf) == wreath2.act(a1, wreath2.act(a0, leaf))

    def test_root_generator_swaps_halves(self, wreath2):
        a0 = wreath2.generators[0]
        assert wreath2.leaf_permutation(a0) == [4, 5, 6, 7, 0, 1, 2, 3]

    def test_inverse(self, wreath2):
        g = wreath2.from_indices([0, 1, 2, 1])
        assert wreath2.is_identity(wreath2.multiply(g, wreath2.invert(g)))
        assert wreath2.is_identity(wreath2.multiply(wreath2.invert(g), g))

    def test_format(self, wreath1):
        assert wreath1.format(wreath1.generators[1]) == "0|10"

    def test_level_limits(self):
        with pytest.raises(ConfigurationError):
            WreathBackend(-1)
        with pytest.raises(ConfigurationError):
            WreathBackend(21)

    def test_embed(self, wreath1, wreath2):
        for i, g in enumerate(wreath1.generators):
            assert embed(g, 2) == wreath2.generators[i]


def test_leaf_addressing():
    assert leaf_letters(6, 2) == (1, 1, 0)
    assert leaf_index((1, 1, 0)) == 6


@pytest.mark.parametrize("leaf", range(8))
def test_schreier_reaches_leaf(wreath2, leaf):
    assert wreath2.act(schreier(leaf, wreath2), 0) == leaf


def test_all_elements():
    assert len(list(all_elements(1))) == 8
    with pytest.raises(ConfigurationError):
        list(all_elements(4))


def test_exact_length_ball():
    the_ball = exact_length_ball(1)
    assert len(the_ball) == 8
    assert the_ball.radius == 4
    with pytest.raises(ConfigurationError):
        exact_length_ball(4)


@pytest.mark.parametrize("n", [0, 1, 2])
def test_law_witnesses(n):
    backend = WreathBackend(n)
    for w in enumerate_reduced(2, n + 1):
        witness = law_witness(w, n)
        assert witness.exact_lengths
        assert witness.total_length <= (n + 1) ** 2
        assert len(set(witness.points)) == len(w) + 1
        assert not backend.is_identity(evaluate(w, list(witness.elements), backend)), format_word(w)


@pytest.mark.slow
def test_law_witnesses_level_three():
    backend = WreathBackend(3)
    for w in enumerate_reduced(2, 4):
        witness = law_witness(w, 3)
        assert witness.total_length <= 16
        assert not backend.is_identity(evaluate(w, list(witness.elements), backend))


def test_law_witness_without_exact_lengths(word):
    witness = law_witness(word("abAB"), 5, exact_lengths=False)
    assert witness.lengths == tuple(len(x) for x in witness.words)
    assert witness.total_length <= 36


def test_law_witness_orbit(wreath2, word):
    witness = law_witness(word("abA"), 2)
    assert orbit_points(word("abA"), witness.elements, wreath2) == list(witness.points)
    payload = witness.to_dict(wreath2)
    assert payload["word"] == "abA"
    assert len(payload["orbit"]) == 4


def test_law_witness_rejects(word):
    with pytest.raises(ConfigurationError):
        law_witness(word("1"), 2)
    with pytest.raises(ConfigurationError):
        law_witness(word("abAB"), 2)


def test_shortest_laws(word):
    assert shortest_law(0, 3) == word("aa")
    assert shortest_law(1, 4) == word("aaaa")
    with pytest.raises(NotFoundWithin):
        shortest_law(1, 3)
