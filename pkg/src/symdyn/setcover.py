"""Exact minimum set cover by branch and bound.

Sets and the universe are bitmasks held in Python ints. The search branches on the
uncovered element with the fewest covering sets, bounds below by a packing of
elements no two of which share a set, and starts from a greedy cover.

:author: Shay Hill
:created: 2024-03-10
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

from paragraphs import par

from symdyn.errors import ArgumentError, ResourceCapError

logger = logging.getLogger(__name__)

_DOMINANCE_LIMIT = 2048


@dataclass(frozen=True)
class SetCoverResult:
    """A minimum cover.

    :param size: number of sets in the cover
    :param chosen: indices into the input sets
    :param nodes: branch-and-bound nodes visited
    """

    size: int
    chosen: tuple[int, ...]
    nodes: int


def _bits(mask: int) -> list[int]:
    found: list[int] = []
    while mask:
        low = mask & -mask
        found.append(low.bit_length() - 1)
        mask ^= low
    return found


def _popcount(mask: int) -> int:
    return bin(mask).count("1")


def _prune(sets: Sequence[int]) -> list[int]:
    """Indices of distinct, nonempty sets not strictly inside another."""
    seen: dict[int, int] = {}
    for i, mask in enumerate(sets):
        if mask and mask not in seen:
            seen[mask] = i
    masks = sorted(seen, key=lambda m: (-_popcount(m), seen[m]))
    if len(masks) > _DOMINANCE_LIMIT:
        return [seen[m] for m in masks]
    kept: list[int] = []
    for mask in masks:
        if not any(mask | other == other for other in kept):
            kept.append(mask)
    return [seen[m] for m in kept]


class _Search:
    def __init__(self, sets: list[int], universe: int, max_nodes: int) -> None:
        self.sets = sets
        self.universe = universe
        self.max_nodes = max_nodes
        self.nodes = 0
        self.holders: dict[int, list[int]] = {}
        for k, mask in enumerate(sets):
            for element in _bits(mask):
                self.holders.setdefault(element, []).append(k)
        self.best: list[int] = self._greedy()

    def _greedy(self) -> list[int]:
        left, chosen = self.universe, []
        while left:
            k = max(
                range(len(self.sets)),
                key=lambda i: (_popcount(self.sets[i] & left), -i),
            )
            chosen.append(k)
            left &= ~self.sets[k]
        return chosen

    def _lower_bound(self, left: int) -> int:
        """Elements pairwise sharing no set need distinct sets."""
        used = 0
        count = 0
        for element in sorted(_bits(left), key=lambda e: len(self.holders[e])):
            mask = 0
            for k in self.holders[element]:
                mask |= 1 << k
            if not mask & used:
                used |= mask
                count += 1
        largest = max(_popcount(s & left) for s in self.sets)
        return max(count, -(-_popcount(left) // largest))

    def run(self, left: int, chosen: list[int]) -> None:
        self.nodes += 1
        if self.nodes > self.max_nodes:
            msg = par(
                f"""minimum set cover search passed {self.max_nodes} nodes; raise
                max_cover_nodes or lower n."""
            )
            raise ResourceCapError(msg, "max_cover_nodes", self.max_nodes)
        if not left:
            if len(chosen) < len(self.best):
                self.best = list(chosen)
            return
        if len(chosen) + self._lower_bound(left) >= len(self.best):
            return
        element = min(_bits(left), key=lambda e: (len(self.holders[e]), e))
        options = sorted(
            self.holders[element], key=lambda k: (-_popcount(self.sets[k] & left), k)
        )
        for k in options:
            chosen.append(k)
            self.run(left & ~self.sets[k], chosen)
            chosen.pop()


def min_set_cover(
    sets: Sequence[int], universe: int, max_nodes: int = 200_000
) -> SetCoverResult:
    """Smallest number of sets whose union is the universe.

    :param sets: bitmasks
    :param universe: bitmask of elements to cover
    :param max_nodes: node budget
    :return: size, chosen indices (into sets), and nodes visited
    :raise ArgumentError: if the sets do not cover the universe
    :raise ResourceCapError: if the node budget runs out
    """
    union = 0
    for mask in sets:
        union |= mask
    if universe & ~union:
        msg = "sets do not cover the universe"
        raise ArgumentError(msg)
    if not universe:
        return SetCoverResult(0, (), 0)
    live = [i for i, s in enumerate(sets) if s & universe]
    if sum(_popcount(sets[i] & universe) for i in live) == _popcount(universe):
        return SetCoverResult(len(live), tuple(live), 0)
    index = _prune([sets[i] & universe for i in live])
    index = [live[i] for i in index]
    search = _Search([sets[i] & universe for i in index], universe, max_nodes)
    search.run(universe, [])
    chosen = tuple(sorted(index[k] for k in search.best))
    logger.debug(
        "set cover: %d of %d sets after pruning, size %d, %d nodes",
        len(index),
        len(sets),
        len(chosen),
        search.nodes,
    )
    return SetCoverResult(len(chosen), chosen, search.nodes)
