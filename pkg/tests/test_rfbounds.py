import itertools

import pytest

from lawbench.engine import saturate
from lawbench.error_handler import BudgetExceeded, ConfigurationError
from lawbench.rfbounds import (
    EXPONENT_LAWS,
    NILPOTENT_LAWS,
    exponent_law,
    law_generator,
    nilpotent_law,
    p_group_laws,
    p_power_law,
    rf_lower_bound,
)
from lawbench.words import evaluate


class TestLaws:
    def test_exponent_law_length(self):
        law = exponent_law(4)
        assert len(law) == 12
        assert set(law.letters) == {1}

    def test_nilpotent_law_length(self):
        for m in (1, 2, 3):
            assert len(nilpotent_law(m)) == 3 * 2 ** m - 2
        assert nilpotent_law(2).rank == 3

    def test_nilpotent_law_vanishes_on_d4(self, d4):
        law = nilpotent_law(2)
        whole = saturate(d4).elements()
        assert len(whole) == 8
        for triple in itertools.product(whole, repeat=3):
            assert d4.is_identity(evaluate(law, list(triple), d4))

    def test_p_power_law(self):
        assert len(p_power_law(2, 3)) == 8
        assert len(p_power_law(3, 0)) == 1

    @pytest.mark.parametrize("build, argument", [
        (exponent_law, 0),
        (nilpotent_law, 0),
        (lambda m: p_power_law(4, m), 2),
        (lambda m: p_power_law(2, m), -1),
    ])
    def test_invalid_parameters(self, build, argument):
        with pytest.raises(ConfigurationError):
            build(argument)


class TestLawGenerator:
    def test_lookup(self):
        assert law_generator("exponent") is EXPONENT_LAWS
        assert law_generator("finite") is EXPONENT_LAWS
        assert law_generator("nilpotent") is NILPOTENT_LAWS
        assert law_generator("p3").name == "p3"

    @pytest.mark.parametrize("name", ["abelian", "p", "p4", "solvable"])
    def test_unknown(self, name):
        with pytest.raises(ConfigurationError):
            law_generator(name)

    def test_p_group_laws(self):
        generator = p_group_laws(2)
        assert generator.class_bound(3) == 8
        assert len(generator.build(3)) == 8
        assert "2-groups" in generator.description(3)

    def test_metadata_marks_naive_laws(self):
        assert "reproduced" in EXPONENT_LAWS.metadata
        assert "alpha" in NILPOTENT_LAWS.metadata["optimal_law_length"]


class TestLowerBound:
    def test_free_group_exponent(self, free2):
        certificate = rf_lower_bound(free2, 4, EXPONENT_LAWS)
        assert sum(certificate.witness_lengths) <= 2
        assert certificate.length == 12
        assert certificate.provenance == "exact"
        assert certificate.claim == "F(12) > 4"

    def test_free_group_nilpotent(self, free2):
        certificate = rf_lower_bound(free2, 2, NILPOTENT_LAWS)
        assert sum(certificate.witness_lengths) == 3
        assert certificate.length <= len(certificate.law) * max(certificate.witness_lengths)
        body = certificate.to_dict(free2)
        assert body["law_length"] == 10
        assert body["class_bound"] == 2
        assert body["claim"] == certificate.claim

    def test_law_of_the_group_exceeds_budget(self, d4):
        with pytest.raises(BudgetExceeded):
            rf_lower_bound(d4, 2, NILPOTENT_LAWS, budget=6)

    @pytest.mark.slow
    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_grigorchuk_two_power_laws(self, grig, m):
        certificate = rf_lower_bound(grig, m, p_group_laws(2))
        assert not grig.is_identity(certificate.element)
        assert sum(certificate.witness_lengths) <= 2
        assert certificate.class_bound == 2 ** m
        assert certificate.length <= 2 ** m * 2
