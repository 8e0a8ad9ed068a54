"""Test cover, partition, and tower validation.

:author: Shay Hill
:created: 2024-04-06
"""

from fractions import Fraction

import pytest

from symdyn.cylinders import CylinderUnion
from symdyn.errors import ArgumentError, InvalidCoverError, InvalidPartitionError
from symdyn.markers import ReturnLevel
from symdyn.subshifts import SFT, FullShift
from symdyn.towers import SkyscraperRule, TowerColumn, TowerDescription
from symdyn.validations import (
    resolution_of,
    validate_cover,
    validate_partition,
    validate_tower,
)

MARKERS = ((0, 1),)


def cyl(word: str, position: int = 0) -> CylinderUnion:
    return CylinderUnion.cylinder(2, word, position)


def tower_of(*columns: TowerColumn) -> TowerDescription:
    return TowerDescription(
        "skyscraper",
        SkyscraperRule(MARKERS, 2),
        columns,
        tuple(sorted({c.height for c in columns})),
        8,
        Fraction(0),
        exact=True,
    )


def column(height: int, gap: int, mass: Fraction) -> TowerColumn:
    return TowerColumn(height, (ReturnLevel(MARKERS, 0, gap),), mass)


class TestValidateCover:
    def test_resolution(self) -> None:
        assert resolution_of([cyl("0"), cyl("101")]) == 3
        assert resolution_of([CylinderUnion.everything(2)]) == 1

    def test_cover(self, golden: SFT) -> None:
        assert validate_cover(golden, [cyl("0"), cyl("1")]) == 1

    def test_missing_block(self, full: FullShift) -> None:
        with pytest.raises(InvalidCoverError) as err:
            _ = validate_cover(full, [cyl("00"), cyl("1")])
        assert err.value.witness == (0, 1)
        assert "in no cover element" in err.value.args[0]

    def test_other_alphabet(self, golden: SFT) -> None:
        with pytest.raises(InvalidCoverError):
            _ = validate_cover(golden, [CylinderUnion.everything(3)])


class TestValidatePartition:
    def test_partition(self, golden: SFT) -> None:
        """[1] and [10] agree on the golden mean shift."""
        assert validate_partition(golden, [cyl("0"), cyl("10")]) == 2

    def test_overlap(self, full: FullShift) -> None:
        with pytest.raises(InvalidPartitionError) as err:
            _ = validate_partition(full, [cyl("0"), cyl("01"), cyl("1")])
        assert err.value.witness == (0, 1)

    def test_empty(self, full: FullShift) -> None:
        with pytest.raises(InvalidPartitionError):
            _ = validate_partition(full, [])


class TestValidateTower:
    def test_valid(self) -> None:
        columns = column(2, 2, Fraction(1, 4)), column(3, 3, Fraction(1, 6))
        validate_tower(tower_of(*columns))

    def test_height(self) -> None:
        with pytest.raises(ArgumentError) as err:
            validate_tower(tower_of(column(0, 2, Fraction(1, 4))))
        assert "column of height 0" in err.value.args[0]

    def test_overfull(self) -> None:
        with pytest.raises(ArgumentError) as err:
            validate_tower(tower_of(column(2, 2, Fraction(3, 4))))
        assert "total mass" in err.value.args[0]

    def test_floats_skip_mass_check(self) -> None:
        tower = TowerDescription(
            "skyscraper",
            SkyscraperRule(MARKERS, 2),
            (TowerColumn(2, (ReturnLevel(MARKERS, 0, 2),), 0.75),),
            (2,),
            8,
            0.0,
            exact=False,
        )
        validate_tower(tower)

    def test_shared_key(self) -> None:
        with pytest.raises(ArgumentError) as err:
            validate_tower(tower_of(*[column(2, 2, Fraction(1, 8))] * 2))
        assert "share a return key" in err.value.args[0]

    def test_levels_past_the_return(self) -> None:
        """A column taller than its return time meets its own base."""
        with pytest.raises(ArgumentError) as err:
            validate_tower(tower_of(column(3, 2, Fraction(1, 4))))
        assert "may intersect" in err.value.args[0]
