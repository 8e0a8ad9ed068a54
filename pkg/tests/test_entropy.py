"""Test block, cover, and measure entropies.

:author: Shay Hill
:created: 2024-04-04
"""

import math
from fractions import Fraction

import pytest

from symdyn.caps import DEFAULT_CAPS
from symdyn.cylinders import CoverSpec, CylinderUnion, block_partition, symbol_partition
from symdyn.entropy import (
    bits,
    block_entropy,
    block_frequencies,
    count_low_entropy_words,
    cover_entropy,
    entropy_average_identity,
    low_entropy_table,
    markov_entropy,
    min_subcover_count,
    partition_entropy_under_markov,
    phi,
    sft_entropy,
)
from symdyn.errors import ArgumentError, ResourceCapError
from symdyn.measures import MarkovMeasure, markov_chain, parry_measure, uniform_markov
from symdyn.subshifts import SFT, FullShift, random_irreducible_sft

LOG_GOLDEN = math.log((1 + math.sqrt(5)) / 2)


class TestBlockEntropy:
    def test_frequencies(self) -> None:
        found = block_frequencies("0110", 2)
        assert found.windows == 3
        assert found.frequency("01") == Fraction(1, 3)
        assert found.frequency("00") == 0
        assert found.entropy() == pytest.approx(math.log(3))

    def test_constant_word(self) -> None:
        assert block_entropy("0000", 1) == 0

    def test_bounded_by_alphabet(self) -> None:
        assert block_entropy("0101", 1, alphabet=2) == pytest.approx(math.log(2))

    @pytest.mark.parametrize("k", [0, 5])
    def test_block_length(self, k: int) -> None:
        with pytest.raises(ArgumentError):
            _ = block_frequencies("0110", k)

    def test_phi(self) -> None:
        assert phi(0) == 0
        assert phi(Fraction(1, 2)) == pytest.approx(math.log(2) / 2)
        with pytest.raises(ArgumentError):
            _ = phi(1.5)

    def test_bits(self) -> None:
        assert bits(math.log(2)) == pytest.approx(1)


class TestLowEntropyWords:
    def test_constant_words(self) -> None:
        assert count_low_entropy_words(2, 8, 1, 0) == 2

    def test_every_word(self) -> None:
        assert count_low_entropy_words(2, 6, 1, math.log(2)) == 64

    def test_one_in_four(self) -> None:
        """H_1 <= 0.57 admits words with 0, 1, 3, or 4 ones among four."""
        assert count_low_entropy_words(2, 4, 1, 0.57) == 10

    def test_arguments(self) -> None:
        with pytest.raises(ArgumentError):
            _ = count_low_entropy_words(2, 3, 4, 0.1)

    def test_cap(self) -> None:
        caps = DEFAULT_CAPS.replace(max_states=100)
        with pytest.raises(ResourceCapError):
            _ = count_low_entropy_words(2, 8, 1, 0.1, caps)

    @pytest.mark.parametrize("k", [1, 2])
    @pytest.mark.parametrize("h", [0.2, 0.4, 0.6])
    def test_bound_holds_from_threshold(self, k: int, h: float) -> None:
        table = low_entropy_table(2, range(1, 17), k, h, 0.2)
        assert table.threshold is not None
        assert table.threshold <= 12
        for row in table.rows:
            if row.n >= table.threshold:
                assert row.count <= math.exp(row.n * (h + 0.2))

    def test_table_skips_short_words(self) -> None:
        table = low_entropy_table(2, range(1, 4), 2, 0.4, 0.2)
        assert [row.n for row in table.rows] == [2, 3]

    def test_eps(self) -> None:
        with pytest.raises(ArgumentError):
            _ = low_entropy_table(2, range(1, 4), 1, 0.4, 0)


class TestCoverEntropy:
    def test_golden_mean(self, golden: SFT) -> None:
        found = cover_entropy(golden, symbol_partition(golden), 12)
        assert found.counts[12] == 377
        assert abs(found.estimate - LOG_GOLDEN) <= 0.05
        assert found.upper_bound >= found.estimate - 1e-12

    def test_table(self, golden: SFT) -> None:
        rows = cover_entropy(golden, symbol_partition(golden), 3).table()
        assert [row["r"] for row in rows] == [2, 3, 5]

    def test_trivial_cover_has_no_entropy(self, golden: SFT) -> None:
        cover = CoverSpec(golden, [CylinderUnion.everything(2)])
        assert cover_entropy(golden, cover, 4).estimate == 0

    def test_partition_path(self, golden: SFT) -> None:
        """{[0], [10]} partitions the golden mean shift like the symbols do."""
        cover = CoverSpec(
            golden, [CylinderUnion.cylinder(2, "0"), CylinderUnion.cylinder(2, "10")]
        )
        assert min_subcover_count(golden, cover, 3) == 5

    def test_set_cover_path(self, full: FullShift) -> None:
        """[01] inside [0] adds nothing to the symbol partition."""
        elements = [CylinderUnion.cylinder(2, w) for w in ("0", "1", "01")]
        cover = CoverSpec(full, elements)
        assert not cover.is_partition
        assert min_subcover_count(full, cover, 3) == 8

    def test_overlapping_cover(self, full: FullShift) -> None:
        """Two overlapping halves of the full shift on 2-blocks."""
        elements = [
            CylinderUnion.from_cylinders(2, [(0, "00"), (0, "01"), (0, "10")]),
            CylinderUnion.from_cylinders(2, [(0, "01"), (0, "10"), (0, "11")]),
        ]
        cover = CoverSpec(full, elements)
        assert min_subcover_count(full, cover, 1) == 2
        assert min_subcover_count(full, cover, 2) <= 4

    def test_n_max(self, golden: SFT) -> None:
        with pytest.raises(ArgumentError):
            _ = cover_entropy(golden, symbol_partition(golden), 0)

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_sft_entropy(self, seed: int) -> None:
        system = random_irreducible_sft(seed)
        found = cover_entropy(system, symbol_partition(system), 12)
        exact = sft_entropy(system)
        assert abs(found.estimate - exact) <= 0.05
        assert abs(found.growth - exact) <= 0.05


class TestSFTEntropy:
    def test_golden_mean(self, golden: SFT) -> None:
        assert sft_entropy(golden) == pytest.approx(LOG_GOLDEN)

    def test_full_shift(self) -> None:
        assert sft_entropy(FullShift(3)) == pytest.approx(math.log(3))

    def test_finite_system(self, period_two: SFT) -> None:
        assert sft_entropy(period_two) == pytest.approx(0, abs=1e-9)


class TestMeasureEntropy:
    def test_parry_is_maximal(self, golden: SFT) -> None:
        assert markov_entropy(parry_measure(golden)) == pytest.approx(LOG_GOLDEN)

    def test_uniform_split(self, golden: SFT) -> None:
        measure = uniform_markov(golden)
        assert markov_entropy(measure) == pytest.approx(2 / 3 * math.log(2))

    def test_partition_entropy(self, golden: SFT) -> None:
        found = partition_entropy_under_markov(
            golden, symbol_partition(golden), parry_measure(golden), 6
        )
        assert found.value == pytest.approx(LOG_GOLDEN)
        assert found.joint[1] == pytest.approx(found.increments[1])
        assert found.rate >= found.value - 1e-12

    def test_block_partition(self, golden: SFT) -> None:
        measure = uniform_markov(golden)
        found = partition_entropy_under_markov(
            golden, block_partition(golden, 2), measure, 4
        )
        assert found.value == pytest.approx(markov_entropy(measure))

    def test_measure_off_the_subshift(
        self, golden: SFT, fair_coin: MarkovMeasure
    ) -> None:
        with pytest.raises(ArgumentError):
            _ = partition_entropy_under_markov(
                golden, block_partition(golden, 2), fair_coin, 3
            )

    def test_average_over_components(self) -> None:
        half = Fraction(1, 2)
        measure = markov_chain([[half, half, 0], [half, half, 0], [0, 0, 1]])
        found = entropy_average_identity(measure)
        assert found.holds
        assert found.entropy == pytest.approx(math.log(2) / 2)
