"""Test marker search, return levels, and first-return masses.

:author: Shay Hill
:created: 2024-04-05
"""

from fractions import Fraction

import pytest

from symdyn.caps import DEFAULT_CAPS
from symdyn.errors import ArgumentError, ResolutionTooCoarseError
from symdyn.markers import MarkerScan, ReturnLevel, find_marker, first_return_masses
from symdyn.measures import MarkovMeasure, uniform_markov
from symdyn.subshifts import SFT, FullShift, Substitution
from symdyn.words import is_overlap_free, is_unbordered


class TestFindMarker:
    @pytest.mark.parametrize("length", [3, 5, 9])
    def test_golden_mean(self, golden: SFT, length: int) -> None:
        marker = find_marker(golden, length, DEFAULT_CAPS)
        assert len(marker) == length
        assert is_unbordered(marker)
        assert golden.is_admissible(marker)

    def test_positive_mass(self, golden: SFT) -> None:
        measure = uniform_markov(golden)
        marker = find_marker(golden, 6, DEFAULT_CAPS, measure)
        assert measure.cylinder_mass(marker) > 0

    def test_avoid(self) -> None:
        system = FullShift(3)
        first = find_marker(system, 4, DEFAULT_CAPS)
        second = find_marker(system, 4, DEFAULT_CAPS, avoid=[first])
        assert (first, second) == ((0, 1, 1, 1), (0, 1, 1, 2))
        assert is_overlap_free([first, second])

    def test_nothing_left_to_avoid(self, full: SFT) -> None:
        """Only 0111 itself is overlap-free with 0111 among binary 4-blocks."""
        first = find_marker(full, 4, DEFAULT_CAPS)
        assert first == (0, 1, 1, 1)
        with pytest.raises(ResolutionTooCoarseError):
            _ = find_marker(full, 4, DEFAULT_CAPS, avoid=[first])

    def test_prefix(self, golden: SFT) -> None:
        marker = find_marker(golden, 6, DEFAULT_CAPS, prefix="10")
        assert marker[:2] == (1, 0)

    def test_periodic_system_has_none(self, period_two: SFT) -> None:
        with pytest.raises(ResolutionTooCoarseError) as err:
            _ = find_marker(period_two, 3, DEFAULT_CAPS)
        assert "no unbordered marker of length 3" in err.value.args[0]

    def test_substitution(self, morse_shift: Substitution) -> None:
        marker = find_marker(morse_shift, 5, DEFAULT_CAPS)
        assert morse_shift.is_admissible(marker)
        assert is_unbordered(marker)

    def test_length(self, golden: SFT) -> None:
        with pytest.raises(ArgumentError):
            _ = find_marker(golden, 0, DEFAULT_CAPS)


class TestReturnLevel:
    def test_contains(self) -> None:
        level = ReturnLevel(((0, 0, 1),), 0, 3)
        assert level.window() == (0, 6)
        assert level.contains((0, 0, 1, 0, 0, 1))
        assert not level.contains((0, 0, 1, 0, 0, 0))

    def test_contains_with_origin(self) -> None:
        level = ReturnLevel(((0, 0, 1),), 1, 3)
        assert level.contains((0, 0, 1, 0, 0, 1), origin=1)

    def test_window_too_short(self) -> None:
        level = ReturnLevel(((0, 0, 1),), 0, 3)
        with pytest.raises(ArgumentError):
            _ = level.contains((0, 0, 1))

    def test_disjoint_by_gap(self) -> None:
        left = ReturnLevel(((0, 0, 1),), 0, 3)
        assert left.provably_disjoint(ReturnLevel(((0, 0, 1),), 0, 4))
        assert not left.provably_disjoint(left)

    def test_disjoint_by_offset(self) -> None:
        level = ReturnLevel(((0, 0, 1),), 0, 3)
        assert level.provably_disjoint(level.shifted(1))

    def test_other_markers(self) -> None:
        level = ReturnLevel(((0, 0, 1),), 0, 3)
        assert not level.provably_disjoint(ReturnLevel(((0, 1, 1),), 1, 3))

    def test_str(self) -> None:
        assert str(ReturnLevel(((0, 1),), 2, 5)) == "T^2B_5"


class TestFirstReturns:
    def test_fair_coin(self, fair_coin: MarkovMeasure) -> None:
        masses, residual, base = first_return_masses(fair_coin, ["01"], 12)
        assert base == Fraction(1, 4)
        assert 1 not in masses
        assert masses[2] == Fraction(1, 16)
        assert masses[3] == Fraction(1, 16)
        assert sum(masses.values()) + residual == base

    def test_kac(self, fair_coin: MarkovMeasure) -> None:
        """Return times average to 1 / mu(B)."""
        masses, _, _ = first_return_masses(fair_coin, ["01"], 128)
        assert float(sum(k * m for k, m in masses.items())) == pytest.approx(
            1, abs=1e-6
        )

    def test_period_two(self, period_two: SFT) -> None:
        measure = uniform_markov(period_two)
        masses, residual, base = first_return_masses(measure, ["0"], 5)
        assert masses == {2: Fraction(1, 2)}
        assert residual == 0
        assert base == Fraction(1, 2)

    def test_markers_of_one_length(self, fair_coin: MarkovMeasure) -> None:
        with pytest.raises(ArgumentError):
            _ = MarkerScan(fair_coin, ["0", "01"])
