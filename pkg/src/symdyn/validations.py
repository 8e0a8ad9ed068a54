"""Ensure covers, partitions, and towers are valid.

Exhaustive checks over the admissible blocks of a subshift. These run when a
CoverSpec or PartitionSpec is built and are available to the test suite.

:author: Shay Hill
:created: 2024-03-03
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Sequence

from paragraphs import par

from symdyn.errors import ArgumentError, InvalidCoverError, InvalidPartitionError
from symdyn.words import word_str

if TYPE_CHECKING:
    from symdyn.cylinders import CylinderUnion
    from symdyn.subshifts import Subshift
    from symdyn.towers import TowerDescription


def _confirm_alphabets_match(subshift: Subshift, sets: Sequence[CylinderUnion]) -> None:
    """Confirm every set is over the subshift alphabet."""
    for cylinders in sets:
        if cylinders.alphabet != subshift.alphabet:
            msg = f"{cylinders.text()} is over alphabet {cylinders.alphabet}"
            raise InvalidCoverError(msg)


def _confirm_anchored(sets: Sequence[CylinderUnion]) -> None:
    """Confirm no set depends on coordinates left of the origin."""
    for cylinders in sets:
        if cylinders.hi > cylinders.lo and cylinders.lo < 0:
            msg = par(
                f"""{cylinders.text()} depends on coordinate {cylinders.lo}; covers
                and partitions are anchored at 0."""
            )
            raise InvalidCoverError(msg)


def resolution_of(sets: Sequence[CylinderUnion]) -> int:
    """Smallest L such that every set is decided by the block at [0, L)."""
    return max([1] + [c.hi for c in sets if c.hi > c.lo])


def validate_cover(subshift: Subshift, elements: Sequence[CylinderUnion]) -> int:
    """Confirm the elements cover every admissible block.

    :param subshift: the system to cover
    :param elements: candidate cover
    :return: the resolution L of the cover
    :raise InvalidCoverError: if there are no elements, an element is left of 0,
        or an admissible L-block lies in no element
    """
    if not elements:
        msg = "a cover needs at least one element"
        raise InvalidCoverError(msg)
    _confirm_alphabets_match(subshift, elements)
    _confirm_anchored(elements)
    width = resolution_of(elements)
    for block in subshift.language(width):
        if not any(e.allows(block, 0) for e in elements):
            msg = f"admissible block {word_str(block)} is in no cover element"
            raise InvalidCoverError(msg, block)
    return width


def validate_partition(subshift: Subshift, cells: Sequence[CylinderUnion]) -> int:
    """Confirm the cells are pairwise disjoint on X and cover it.

    :param subshift: the system to partition
    :param cells: candidate cells
    :return: the resolution L of the partition
    :raise InvalidPartitionError: if two cells share an admissible block or a
        block lies in no cell
    """
    if not cells:
        msg = "a partition needs at least one cell"
        raise InvalidPartitionError(msg)
    _confirm_alphabets_match(subshift, cells)
    _confirm_anchored(cells)
    width = resolution_of(cells)
    for block in subshift.language(width):
        owners = [i for i, c in enumerate(cells) if c.allows(block, 0)]
        if not owners:
            msg = f"admissible block {word_str(block)} is in no cell"
            raise InvalidPartitionError(msg, block)
        if len(owners) > 1:
            msg = f"cells {owners} overlap on admissible block {word_str(block)}"
            raise InvalidPartitionError(msg, block)
    return width


def _confirm_heights_positive(tower: TowerDescription) -> None:
    """Confirm every column has positive height."""
    for column in tower.columns:
        if column.height < 1:
            msg = f"column of height {column.height}"
            raise ArgumentError(msg)


def _confirm_masses_add_up(tower: TowerDescription) -> None:
    """Confirm height-weighted column masses plus residual do not exceed 1."""
    if not tower.exact:
        return
    total = sum(c.height * c.mass for c in tower.columns) + tower.residual
    if total > 1 + 1e-9:
        msg = f"tower columns carry total mass {float(total)} > 1"
        raise ArgumentError(msg)


def _confirm_levels_disjoint(tower: TowerDescription) -> None:
    """Confirm the level sets of distinct (column, level) pairs are disjoint."""
    levels = [lv for c in tower.columns for lv in c.levels()]
    keys = {(lv.offset, lv.gap) for lv in levels}
    if len(keys) < len(levels):
        msg = "two tower levels share a return key"
        raise ArgumentError(msg)
    markers = set(tower.markers)
    if all(
        0 <= lv.offset < lv.gap and set(lv.markers) == markers for lv in levels
    ):
        # levels of one skyscraper with distinct keys never meet
        return
    for i, left in enumerate(levels):
        for right in levels[i + 1 :]:
            if not left.provably_disjoint(right):
                msg = f"levels {left} and {right} may intersect"
                raise ArgumentError(msg)


def validate_tower(tower: TowerDescription) -> None:
    """Confirm a tower's columns are well formed and its levels disjoint.

    :param tower: tower to check
    :raise ArgumentError: on a non-positive height, overfull mass, or two levels
        that are not provably disjoint
    """
    _confirm_heights_positive(tower)
    _confirm_masses_add_up(tower)
    _confirm_levels_disjoint(tower)
