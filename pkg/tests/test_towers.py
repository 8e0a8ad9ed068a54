"""Test skyscrapers, two-height and nested towers, fibers, and uniformity.

:author: Shay Hill
:created: 2024-04-06
"""

from fractions import Fraction

import pytest

from symdyn.caps import DEFAULT_CAPS
from symdyn.cylinders import CylinderUnion, symbol_partition
from symdyn.errors import (
    ArgumentError,
    PreconditionError,
    ResolutionTooCoarseError,
    ResourceCapError,
)
from symdyn.measures import FrequencyMeasure, MarkovMeasure, uniform_markov
from symdyn.subshifts import SFT, FullShift, Substitution
from symdyn.towers import (
    RohlinRule,
    TowerDescription,
    TwoHeightRule,
    erg_threshold,
    good_fiber_fraction,
    kakutani_skyscraper,
    kr_two_heights,
    nest_tower,
    return_times,
    sample_point,
    system_period,
    two_height_blocks,
    uniformity_defect,
)


def cyl(word: str) -> CylinderUnion:
    return CylinderUnion.cylinder(2, word)


@pytest.fixture(scope="module")
def golden_two(golden: SFT) -> TowerDescription:
    """Two-height tower of 2s and 3s on the golden mean shift."""
    return kr_two_heights(golden, uniform_markov(golden), 2, horizon=128)


class TestTwoHeightBlocks:
    def test_split(self) -> None:
        assert two_height_blocks(7, 3) == (1, 1)
        assert two_height_blocks(41, 2) == (19, 1)
        assert two_height_blocks(9, 3) == (3, 0)

    def test_too_short(self) -> None:
        with pytest.raises(PreconditionError) as err:
            _ = two_height_blocks(5, 3)
        assert "cannot be cut" in err.value.args[0]


class TestRules:
    def test_two_height_edges(self) -> None:
        rule = TwoHeightRule(["01"], 2, 2)
        point = (0, 1, 0, 0, 0, 0, 1)
        assert rule.edges(point) == [0, 2, 5]
        assert rule.orbit_return_times(point) == [2, 3]
        assert rule.level_of(point, 3) == (3, 1)

    def test_level_outside_shown_columns(self) -> None:
        rule = TwoHeightRule(["01"], 2, 2)
        assert rule.level_of((0, 1, 0, 0, 0, 0, 1), 6) is None

    def test_rohlin_levels(self) -> None:
        rule = RohlinRule(["01"], 2, 2)
        point = (0, 1, 0, 0, 0, 0, 1)
        assert rule.level_of(point, 1) == (2, 1)
        assert rule.level_of(point, 3) == (2, 1)
        assert rule.level_of(point, 4) is None


class TestReturnTimes:
    def test_golden_mean(self, golden: SFT) -> None:
        profile = return_times(golden, cyl("1"), uniform_markov(golden), 20)
        assert profile.base_mass == Fraction(1, 3)
        assert profile.masses[2] == Fraction(1, 6)
        assert profile.masses[3] == Fraction(1, 12)
        assert profile.conditional()[2] == Fraction(1, 2)
        assert sum(profile.masses.values()) + profile.residual == Fraction(1, 3)

    def test_kac(self, golden: SFT) -> None:
        profile = return_times(golden, cyl("1"), uniform_markov(golden), 64)
        total = sum(h * m for h, m in profile.masses.items())
        assert float(total) == pytest.approx(1, abs=1e-9)

    def test_everything(self, full: FullShift, fair_coin: MarkovMeasure) -> None:
        profile = return_times(full, CylinderUnion.everything(2), fair_coin)
        assert profile.masses == {1: 1}

    def test_measure_zero(self, golden: SFT) -> None:
        with pytest.raises(ArgumentError) as err:
            _ = return_times(golden, cyl("11"), uniform_markov(golden))
        assert "measure zero" in err.value.args[0]

    def test_measure_off_the_subshift(
        self, golden: SFT, fair_coin: MarkovMeasure
    ) -> None:
        with pytest.raises(ArgumentError):
            _ = return_times(golden, cyl("1"), fair_coin)


class TestSkyscraper:
    def test_columns(self, golden: SFT) -> None:
        tower = kakutani_skyscraper(golden, ["1"], uniform_markov(golden), 10)
        assert tower.heights == tuple(range(2, 11))
        assert tower.exact
        assert tower.height_masses()[4] == Fraction(1, 24)
        assert 1 - Fraction(1, 100) < tower.covered <= 1
        assert tower.marker_base() == cyl("1")
        assert tower.describe()["kind"] == "skyscraper"

    def test_column_mass_is_at_most_one(self, golden: SFT) -> None:
        tower = kakutani_skyscraper(golden, cyl("1"), uniform_markov(golden), 30)
        total = sum(c.height * c.mass for c in tower.columns)
        assert 1 - Fraction(1, 10**6) < total <= 1

    def test_empty_base(self, golden: SFT) -> None:
        with pytest.raises(ArgumentError):
            _ = kakutani_skyscraper(golden, ["11"], uniform_markov(golden))


class TestTwoHeights:
    def test_heights(self, golden_two: TowerDescription) -> None:
        assert golden_two.heights == (2, 3)
        assert set(golden_two.height_masses()) <= {2, 3}
        assert golden_two.notes["marker_length"] == 41

    def test_orbit_returns(self, golden: SFT, golden_two: TowerDescription) -> None:
        for seed in range(4):
            point = sample_point(golden, golden_two.markers, seed=seed)
            times = golden_two.rule.orbit_return_times(point)
            assert times
            assert set(times) <= {2, 3}

    def test_columns_split_return_times(self, golden_two: TowerDescription) -> None:
        for column in golden_two.columns:
            for piece in column.pieces:
                assert 0 <= piece.offset < piece.gap
                assert piece.gap >= 41

    def test_full_shift(self, full: FullShift, fair_coin: MarkovMeasure) -> None:
        tower = kr_two_heights(full, fair_coin, 3, horizon=128)
        assert tower.heights == (3, 4)
        point = sample_point(full, tower.markers, seed=7)
        assert set(tower.rule.orbit_return_times(point)) <= {3, 4}

    def test_height_one(self, golden: SFT) -> None:
        tower = kr_two_heights(golden, uniform_markov(golden), 1, horizon=32)
        assert tower.heights == (1, 2)
        assert set(tower.height_masses()) == {1}

    def test_covered_mass_is_reported(
        self, full: FullShift, fair_coin: MarkovMeasure
    ) -> None:
        """Returns to a marker of length 91 within 512 steps have tiny mass."""
        tower = kr_two_heights(full, fair_coin, 3)
        described = tower.describe()
        assert tower.exact
        assert tower.covered < Fraction(1, 10**20)
        assert described["covered"] == float(tower.covered)
        assert described["residual_float"] == float(tower.residual)

    def test_periodic_system(self, period_two: SFT) -> None:
        with pytest.raises(ResolutionTooCoarseError):
            _ = kr_two_heights(period_two, uniform_markov(period_two), 2)

    def test_size(self, golden: SFT) -> None:
        with pytest.raises(ArgumentError):
            _ = kr_two_heights(golden, uniform_markov(golden), 0)


class TestNested:
    def test_heights(self, golden: SFT, golden_two: TowerDescription) -> None:
        tower = nest_tower(golden, golden_two, 6)
        assert tower.heights == tuple(range(6, 12))
        assert tower.markers[0][:41] == golden_two.markers[0]
        point = sample_point(golden, tower.markers, seed=2)
        times = tower.rule.orbit_return_times(point)
        assert times
        assert all(6 <= t <= 6 + 4 * 3 for t in times)
        outer_edges = set(golden_two.rule.edges(point))
        assert set(tower.rule.edges(point)) <= outer_edges

    def test_n_too_small(self, golden: SFT, golden_two: TowerDescription) -> None:
        with pytest.raises(ArgumentError) as err:
            _ = nest_tower(golden, golden_two, 5)
        assert "below 2 x the outer height 3" in err.value.args[0]

    def test_needs_bounded_outer(self, golden: SFT) -> None:
        outer = kakutani_skyscraper(golden, ["1"], uniform_markov(golden), 10)
        with pytest.raises(ArgumentError):
            _ = nest_tower(golden, outer, 40)


class TestFibers:
    def test_all_fibers_good(self, golden: SFT) -> None:
        measure = uniform_markov(golden)
        tower = kakutani_skyscraper(golden, ["1"], measure, 20)
        report = good_fiber_fraction(golden, tower, cyl("0"), measure, "1/2")
        assert report.exact
        assert report.mean == Fraction(2, 3)
        assert report.fraction == report.covered

    def test_only_some_fibers_good(self, golden: SFT) -> None:
        """Fibers 1 0^(l-1) average (l - 1) / l; only l = 3, 4 are near 2/3."""
        measure = uniform_markov(golden)
        tower = kakutani_skyscraper(golden, ["1"], measure, 20)
        report = good_fiber_fraction(golden, tower, cyl("0"), measure, "1/10")
        assert report.fraction == Fraction(5, 12)

    def test_needs_skyscraper(
        self, golden: SFT, golden_two: TowerDescription
    ) -> None:
        measure = uniform_markov(golden)
        with pytest.raises(ArgumentError):
            _ = good_fiber_fraction(golden, golden_two, cyl("0"), measure, 0.1)

    def test_erg_threshold(self, period_two: SFT) -> None:
        found = erg_threshold(period_two, cyl("0"), uniform_markov(period_two), 1)
        assert found.delta == Fraction(1, 121)
        assert found.window == 2
        assert found.n0 == 242

    def test_erg_threshold_past_window_cap(
        self, full: FullShift, fair_coin: MarkovMeasure
    ) -> None:
        found = erg_threshold(full, cyl("0"), fair_coin, "1/2", window_cap=64)
        assert found.window is None
        assert found.n0 is None


class TestUniformity:
    def test_morse_improves(self, morse_shift: Substitution) -> None:
        """Every Morse window of even length N has 0 or 2 extra of one symbol."""
        measure = FrequencyMeasure(morse_shift)
        lengths = [16, 64, 256, 1024]
        report = uniformity_defect(
            morse_shift, symbol_partition(morse_shift), measure, lengths
        )
        values = [report.deviations[n] for n in lengths]
        assert values == sorted(values, reverse=True)
        for n in lengths:
            assert report.deviations[n] == pytest.approx(1 / n, abs=1e-9)
        assert report.deviations[1024] < 0.05

    def test_full_shift_is_not_uniform(
        self, full: FullShift, fair_coin: MarkovMeasure
    ) -> None:
        report = uniformity_defect(full, symbol_partition(full), fair_coin, [4, 8])
        assert report.deviations == {4: 0.5, 8: 0.5}
        assert report.witnesses[8] == "00000000"

    def test_full_shift_sampled(
        self, full: FullShift, fair_coin: MarkovMeasure
    ) -> None:
        lengths = [16, 64, 256, 1024]
        report = uniformity_defect(
            full, symbol_partition(full), fair_coin, lengths, mode="sampled"
        )
        for n in lengths:
            assert report.deviations[n] >= 0.5
            assert report.witnesses[n] == "0" * n

    def test_sampled_is_lower_bound(
        self, full: FullShift, fair_coin: MarkovMeasure
    ) -> None:
        partition = symbol_partition(full)
        sampled = uniformity_defect(full, partition, fair_coin, [6], mode="sampled")
        exhaustive = uniformity_defect(full, partition, fair_coin, [6])
        assert sampled.deviations[6] <= exhaustive.deviations[6]
        assert sampled.windows[6] < exhaustive.windows[6]

    def test_order_two(self, full: FullShift, fair_coin: MarkovMeasure) -> None:
        report = uniformity_defect(
            full, symbol_partition(full), fair_coin, [4], order=2
        )
        assert report.deviations[4] == pytest.approx(0.75)

    def test_mode(self, full: FullShift, fair_coin: MarkovMeasure) -> None:
        with pytest.raises(ArgumentError):
            _ = uniformity_defect(
                full, symbol_partition(full), fair_coin, [4], mode="random"
            )

    def test_cap(self, full: FullShift, fair_coin: MarkovMeasure) -> None:
        caps = DEFAULT_CAPS.replace(max_states=1000)
        with pytest.raises(ResourceCapError):
            _ = uniformity_defect(
                full, symbol_partition(full), fair_coin, [12], caps=caps
            )


def test_system_period(golden: SFT, period_two: SFT, two_shifts: SFT) -> None:
    assert system_period(golden) == 1
    assert system_period(period_two) == 2
    assert system_period(two_shifts) == 1
