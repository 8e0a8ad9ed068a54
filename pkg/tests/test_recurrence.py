"""Test wandering masses and minimal subsystems.

:author: Shay Hill
:created: 2024-04-09
"""

from fractions import Fraction

import pytest

from symdyn.cylinders import CylinderUnion
from symdyn.errors import ArgumentError
from symdyn.measures import MarkovMeasure, uniform_markov
from symdyn.recurrence import minimal_subsystem, wandering_profile
from symdyn.subshifts import SFT, FullShift


class TestWandering:
    def test_golden_mean(self, golden: SFT) -> None:
        found = wandering_profile(
            golden, CylinderUnion.cylinder(2, "1"), uniform_markov(golden), 4
        )
        assert found.base == Fraction(1, 3)
        assert found.masses == (
            Fraction(1, 3),
            Fraction(1, 6),
            Fraction(1, 12),
            Fraction(1, 24),
        )
        assert found.last == Fraction(1, 24)

    def test_masses_fall_to_zero(
        self, full: FullShift, fair_coin: MarkovMeasure
    ) -> None:
        found = wandering_profile(full, CylinderUnion.cylinder(2, "01"), fair_coin, 60)
        assert list(found.masses) == sorted(found.masses, reverse=True)
        assert found.last < Fraction(1, 10**3)

    def test_everything(self, full: FullShift, fair_coin: MarkovMeasure) -> None:
        found = wandering_profile(full, CylinderUnion.everything(2), fair_coin, 3)
        assert found.masses == (0, 0, 0)

    def test_empty(self, full: FullShift, fair_coin: MarkovMeasure) -> None:
        with pytest.raises(ArgumentError) as err:
            nothing = CylinderUnion.from_cylinders(2, [])
            _ = wandering_profile(full, nothing, fair_coin, 3)
        assert "A is empty" in err.value.args[0]

    def test_measure_off_the_subshift(
        self, golden: SFT, fair_coin: MarkovMeasure
    ) -> None:
        with pytest.raises(ArgumentError):
            _ = wandering_profile(golden, CylinderUnion.cylinder(2, "1"), fair_coin, 3)


class TestMinimalSubsystem:
    def test_full_shift(self, full: FullShift) -> None:
        found = minimal_subsystem(full, 3)
        assert found.forbidden == ((0,),)
        assert found.period == 1

    def test_golden_mean(self, golden: SFT) -> None:
        found = minimal_subsystem(golden, 3)
        assert found.forbidden == ((1,),)
        assert found.period == 1

    def test_periodic_orbit_is_minimal(self, period_two: SFT) -> None:
        found = minimal_subsystem(period_two, 4)
        assert found.forbidden == ()
        assert found.period == 2

    def test_word_length(self, golden: SFT) -> None:
        with pytest.raises(ArgumentError):
            _ = minimal_subsystem(golden, 0)
