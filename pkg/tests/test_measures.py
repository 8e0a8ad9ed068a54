"""Test invariant measures and their cylinder masses.

:author: Shay Hill
:created: 2024-04-03
"""

from fractions import Fraction

import pytest

from symdyn.errors import ArgumentError
from symdyn.measures import (
    FrequencyMeasure,
    MarkovMeasure,
    PeriodicMeasure,
    as_mass,
    bernoulli,
    entropy_of_vector,
    markov_chain,
    markov_family,
    parry_measure,
    random_markov,
    uniform_markov,
)
from symdyn.subshifts import SFT, Substitution


def test_as_mass() -> None:
    assert as_mass("1/3") == Fraction(1, 3)
    assert isinstance(as_mass(0.5), float)


class TestMarkovMeasure:
    def test_bernoulli_is_exact(self, fair_coin: MarkovMeasure) -> None:
        assert fair_coin.exact
        assert fair_coin.cylinder_mass("011") == Fraction(1, 8)
        assert fair_coin.cylinder_mass("") == 1
        assert bernoulli(["1/4", "3/4"]).cylinder_mass("11") == Fraction(9, 16)

    def test_uniform_golden_stationary(self, golden: SFT) -> None:
        measure = uniform_markov(golden)
        assert measure.stationary == (Fraction(2, 3), Fraction(1, 3))
        assert measure.cylinder_mass("01") == Fraction(1, 3)
        assert measure.cylinder_mass("11") == 0

    def test_block_distribution(self, golden: SFT) -> None:
        measure = uniform_markov(golden)
        third = Fraction(1, 3)
        assert measure.block_distribution(2) == {
            (0, 0): third,
            (0, 1): third,
            (1, 0): third,
        }

    def test_joint_mass(self, golden: SFT) -> None:
        """[0]_0 meet [0]_2 under the uniform split."""
        measure = uniform_markov(golden)
        assert measure.joint_mass("0", "0", 1) == Fraction(1, 2)

    def test_joint_mass_of_period_two(self, period_two: SFT) -> None:
        measure = uniform_markov(period_two)
        assert measure.joint_mass("0", "1", 0) == Fraction(1, 2)
        assert measure.joint_mass("0", "0", 0) == 0

    def test_supported_on(self, golden: SFT, fair_coin: MarkovMeasure) -> None:
        assert uniform_markov(golden).is_supported_on(golden)
        assert not fair_coin.is_supported_on(golden)

    def test_row_sum(self) -> None:
        with pytest.raises(ArgumentError) as err:
            _ = markov_chain([["1/2", "1/4"], ["1", "0"]])
        assert "sums to" in err.value.args[0]

    def test_not_overlapping(self) -> None:
        with pytest.raises(ArgumentError) as err:
            _ = MarkovMeasure(2, ["00", "11"], [[0, 1], [1, 0]])
        assert "does not overlap" in err.value.args[0]

    def test_not_invariant(self) -> None:
        with pytest.raises(ArgumentError) as err:
            _ = MarkovMeasure(2, ["0", "1"], [[0, 1], [1, 0]], ["1", "0"])
        assert "not shift-invariant" in err.value.args[0]

    def test_reducible_chain(self) -> None:
        measure = markov_chain([[1, 0], [0, 1]])
        assert measure.stationary == (Fraction(1, 2), Fraction(1, 2))
        assert not measure.is_ergodic
        assert measure.has_atoms
        weights = [w for w, _ in measure.ergodic_decomposition()]
        assert weights == [Fraction(1, 2), Fraction(1, 2)]

    def test_class_weights(self) -> None:
        weights = [Fraction(1, 4), Fraction(3, 4)]
        measure = MarkovMeasure(2, ["0", "1"], [[1, 0], [0, 1]], class_weights=weights)
        assert measure.cylinder_mass("1") == Fraction(3, 4)

    def test_fair_coin_has_no_atoms(self, fair_coin: MarkovMeasure) -> None:
        assert fair_coin.is_ergodic
        assert not fair_coin.has_atoms


class TestParry:
    def test_golden_mean(self, golden: SFT) -> None:
        measure = parry_measure(golden)
        assert not measure.exact
        golden_ratio = (1 + 5**0.5) / 2
        assert measure.cylinder_mass("1") == pytest.approx(1 / (golden_ratio**2 + 1))

    def test_full_shift_is_uniform(self, full: SFT) -> None:
        measure = parry_measure(full)
        assert measure.cylinder_mass("010") == pytest.approx(1 / 8)


class TestFamilies:
    def test_markov_family(self, golden: SFT) -> None:
        family = markov_family(golden, 4)
        assert len(family) == 4
        assert all(m.is_supported_on(golden) for m in family)
        assert family[0].name.startswith("parry")

    def test_random_markov_is_reproducible(self, golden: SFT) -> None:
        first = random_markov(golden, 5)
        second = random_markov(golden, 5)
        assert first.exact
        assert first.transition == second.transition


class TestPeriodicMeasure:
    def test_masses(self) -> None:
        measure = PeriodicMeasure("01", 2)
        assert measure.cylinder_mass("0") == Fraction(1, 2)
        assert measure.cylinder_mass("00") == 0
        assert measure.cylinder_mass("010") == Fraction(1, 2)

    def test_empty_cycle(self) -> None:
        with pytest.raises(ArgumentError):
            _ = PeriodicMeasure("", 2)


def test_morse_frequencies(morse_shift: Substitution) -> None:
    measure = FrequencyMeasure(morse_shift)
    assert measure.cylinder_mass("0") == pytest.approx(0.5)
    assert measure.cylinder_mass("00") == pytest.approx(1 / 6)
    assert measure.cylinder_mass("01") == pytest.approx(1 / 3)
    assert measure.cylinder_mass("000") == 0


def test_entropy_of_vector() -> None:
    assert entropy_of_vector([Fraction(1, 2), Fraction(1, 2), 0]) == pytest.approx(
        0.6931471805599453
    )
