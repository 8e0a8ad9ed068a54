"""Marker words, their return levels, and exact first-return masses.

A marker is an admissible unbordered word w. Two occurrences of w cannot overlap,
so the cylinder [w] is disjoint from its first len(w) - 1 shifts. Several markers
of one length that are mutually overlap-free behave like one.

Return times to a marker cylinder are unbounded, so the levels of a tower over it
are not finite unions of cylinders. A ReturnLevel names one level exactly by the
positions of the surrounding marker occurrences; membership is decided from a
finite window and disjointness of two levels by interval arithmetic.

:author: Shay Hill
:created: 2024-03-08
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterator, Sequence

import numpy as np
from paragraphs import par

from symdyn.errors import ArgumentError, ResolutionTooCoarseError
from symdyn.subshifts import SFT
from symdyn.words import (
    PatternAutomaton,
    Word,
    WordLike,
    as_word,
    is_overlap_free,
    word_str,
)

if TYPE_CHECKING:
    from symdyn.caps import Caps
    from symdyn.measures import Mass, MarkovMeasure
    from symdyn.subshifts import Subshift

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReturnLevel:
    """Points with a marker at -offset, the next one at -offset + gap.

    No marker occurs strictly between. For 0 <= offset < gap this is level
    ``offset`` of the skyscraper column of height ``gap``.
    """

    markers: tuple[Word, ...]
    offset: int
    gap: int

    @property
    def width(self) -> int:
        return len(self.markers[0])

    def window(self) -> tuple[int, int]:
        """Coordinates [lo, hi) that decide membership."""
        lo = -self.offset
        return lo, lo + self.gap + self.width

    def contains(self, point: Sequence[int], origin: int = 0) -> bool:
        """Membership of the point with coordinate 0 at point[origin].

        :raise ArgumentError: if point does not show the deciding window
        """
        lo, hi = self.window()
        start, stop = origin + lo, origin + hi
        if start < 0 or stop > len(point):
            msg = f"point does not show window [{lo}, {hi}) of {self}"
            raise ArgumentError(msg)
        markers = set(self.markers)
        width = self.width
        hits = [
            tuple(point[start + i : start + i + width]) in markers
            for i in range(self.gap + 1)
        ]
        return hits[0] and hits[-1] and not any(hits[1:-1])

    def shifted(self, k: int) -> ReturnLevel:
        """T^k of the level."""
        return ReturnLevel(self.markers, self.offset + k, self.gap)

    def provably_disjoint(self, other: ReturnLevel) -> bool:
        """True if the two levels cannot share a point.

        Decided from marker positions alone when both use the same markers. A
        False answer means only that disjointness does not follow from the keys.
        """
        if set(self.markers) != set(other.markers):
            return False
        first, second = sorted([self, other], key=lambda lv: -lv.offset)
        start_1, start_2 = -first.offset, -second.offset
        if start_1 == start_2:
            return first.gap != second.gap
        return start_2 < start_1 + first.gap

    def __str__(self) -> str:
        return f"T^{self.offset}B_{self.gap}"


def _chain_graph(
    subshift: Subshift, measure: MarkovMeasure | None
) -> tuple[tuple[Word, ...], list[list[int]], list[int]]:
    """States, successor table, and allowed start states of the search graph."""
    if measure is not None:
        starts = [i for i, m in enumerate(measure.stationary) if m > 0]
        return measure.states, measure.successor, starts
    if isinstance(subshift, SFT):
        return subshift.states, subshift.successor, list(range(len(subshift.states)))
    msg = "graph search needs an SFT or a Markov measure"
    raise ArgumentError(msg)


def _graph_words(
    states: tuple[Word, ...], successor: list[list[int]], starts: list[int], n: int
) -> Iterator[tuple[Word, int]]:
    """Words of length n >= block read along the graph, with their end state."""
    block = len(states[0])
    frontier = sorted((states[i], i) for i in starts)
    for _ in range(n - block):
        frontier = [
            ((*w, a), j)
            for w, i in frontier
            for a, j in enumerate(successor[i])
            if j >= 0
        ]
    yield from frontier


def _walk(
    states: tuple[Word, ...],
    successor: list[list[int]],
    starts: list[int],
    word: Word,
) -> int | None:
    """End state of word read along the graph, or None if it is not a path."""
    block = len(states[0])
    if len(word) < block:
        return None
    allowed = {states[i]: i for i in starts}
    state = allowed.get(word[:block])
    if state is None:
        return None
    for symbol in word[block:]:
        state = successor[state][symbol]
        if state < 0:
            return None
    return state


def _extend_unbordered(
    seed: Word,
    end_state: int,
    length: int,
    successor: list[list[int]],
    avoid: Sequence[Word],
    alphabet: int,
) -> Word | None:
    """Least extension of seed to an unbordered word of the given length.

    The extension avoids every occurrence of seed after position 0 and every
    occurrence of an avoid word, and leaves the pattern automaton at its root.
    A backward feasibility table over (graph state, automaton state) drives a
    greedy lexicographic choice.
    """
    automaton = PatternAutomaton([seed, *avoid], alphabet)
    state = 0
    for i, symbol in enumerate(seed):
        state = automaton.delta[state][symbol]
        hits = automaton.hits[state]
        if hits and (i < len(seed) - 1 or tuple(hits) != (0,)):
            return None
    rest = length - len(seed)
    if rest < 0:
        return None
    size_v, size_q = len(successor), automaton.size
    next_v = np.array(successor, dtype=np.int64)
    next_q = np.array(automaton.delta, dtype=np.int64)
    hit = np.array([bool(h) for h in automaton.hits])
    feasible = np.zeros((rest + 1, size_v, size_q), dtype=bool)
    feasible[0, :, 0] = True
    for r in range(1, rest + 1):
        layer = np.zeros((size_v, size_q), dtype=bool)
        for a in range(alphabet):
            nv = next_v[:, a]
            nq = next_q[:, a]
            ok_v = nv >= 0
            ok_q = ~hit[nq]
            reach = feasible[r - 1][np.ix_(np.where(ok_v, nv, 0), nq)]
            layer |= reach & ok_v[:, None] & ok_q[None, :]
        feasible[r] = layer
    if not feasible[rest, end_state, state]:
        return None
    word = list(seed)
    v, q = end_state, state
    for r in range(rest, 0, -1):
        for a in range(alphabet):
            nv, nq = successor[v][a], automaton.delta[q][a]
            if nv >= 0 and not automaton.hits[nq] and feasible[r - 1, nv, nq]:
                word.append(a)
                v, q = nv, nq
                break
    return tuple(word)


def find_marker(
    subshift: Subshift,
    length: int,
    caps: Caps,
    measure: MarkovMeasure | None = None,
    avoid: Sequence[WordLike] = (),
    prefix: WordLike | None = None,
) -> Word:
    """Least admissible unbordered word of the given length.

    :param subshift: system the marker must occur in
    :param length: marker length; its cylinder has this many disjoint iterates
    :param caps: max_seed_length and max_search_candidates bound the search
    :param measure: if given, the marker has positive mass under it
    :param avoid: previously chosen markers of the same length; the result is
        overlap-free with all of them
    :param prefix: if given, the marker starts with this word
    :return: the marker
    :raise ResolutionTooCoarseError: if no such word exists within the search
    """
    if length < 1:
        msg = f"marker length must be positive, not {length}"
        raise ArgumentError(msg)
    avoided = [as_word(w) for w in avoid]
    if isinstance(subshift, SFT) or measure is not None:
        states, successor, starts = _chain_graph(subshift, measure)
        block = len(states[0])
        if prefix is not None:
            head = as_word(prefix)
            end = _walk(states, successor, starts, head)
            seeds = [] if end is None else [(head, end)]
        else:
            top = min(caps.max_seed_length, length)
            seeds = [
                seed
                for n in range(block, top + 1)
                for seed in _graph_words(states, successor, starts, n)
            ]
        tried = 0
        for seed, end_state in seeds:
            if len(seed) < block:
                continue
            tried += 1
            if tried > caps.max_search_candidates:
                break
            word = _extend_unbordered(
                seed, end_state, length, successor, avoided, subshift.alphabet
            )
            if word is None:
                continue
            if isinstance(subshift, SFT) and not subshift.is_admissible(word):
                continue
            if is_overlap_free([*avoided, word]):
                logger.debug("marker of length %d from seed %s", length, word_str(seed))
                return word
    else:
        for word in subshift.language(length):
            if prefix is not None and word[: len(as_word(prefix))] != as_word(prefix):
                continue
            if is_overlap_free([*avoided, word]):
                return word
    msg = par(
        f"""{subshift.name} has no unbordered marker of length {length} in the
        search budget; its cylinder would need {length} disjoint iterates. Periodic
        systems have none past their period."""
    )
    raise ResolutionTooCoarseError(msg)


def _expand_markers(measure: MarkovMeasure, markers: Sequence[Word]) -> list[Word]:
    width = len(markers[0])
    if width >= measure.block:
        return list(markers)
    grown: list[Word] = []
    for word in markers:
        vector = measure.end_vector(word)
        grown.extend(
            measure.states[i]
            for i, m in enumerate(vector)
            if m and measure.states[i][: width] == word
        )
    return grown


class MarkerScan:
    """A Markov chain run jointly with the pattern automaton of some markers.

    Distributions are dicts from (chain state, automaton state) to mass. The
    chain state is the last s symbols read.
    """

    def __init__(self, measure: MarkovMeasure, markers: Sequence[WordLike]) -> None:
        """
        :raise ArgumentError: if markers are empty or of different lengths
        """
        words = [as_word(w) for w in markers]
        if not words or len({len(w) for w in words}) != 1 or not words[0]:
            msg = "markers must be nonempty words of one length"
            raise ArgumentError(msg)
        self.measure = measure
        self.markers = tuple(_expand_markers(measure, words))
        self.automaton = PatternAutomaton(self.markers, measure.alphabet)

    def start(self) -> dict[tuple[int, int], Mass]:
        """Mass of each marker, placed at its end state."""
        measure = self.measure
        dist: dict[tuple[int, int], Mass] = {}
        for word in self.markers:
            mass = measure.cylinder_mass(word)
            if not mass:
                continue
            key = (measure.index[word[-measure.block :]], self.automaton.run(word))
            dist[key] = dist.get(key, measure.zero) + mass
        return dist

    def step(
        self, dist: dict[tuple[int, int], Mass]
    ) -> tuple[dict[tuple[int, int], Mass], Mass]:
        """Read one symbol. Return the mass still searching and the mass that
        completes a marker on this symbol."""
        measure = self.measure
        delta, hits = self.automaton.delta, self.automaton.hits
        searching: dict[tuple[int, int], Mass] = {}
        found = measure.zero
        for (i, q), mass in dist.items():
            for a, j in enumerate(measure.successor[i]):
                if j < 0:
                    continue
                weight = mass * measure.transition[i][j]
                nq = delta[q][a]
                if hits[nq]:
                    found += weight
                else:
                    key = (j, nq)
                    searching[key] = searching.get(key, measure.zero) + weight
        return searching, found


def first_return_masses(
    measure: MarkovMeasure, markers: Sequence[WordLike], horizon: int
) -> tuple[dict[int, Mass], Mass, Mass]:
    """Exact masses of B_l = {x in B : first return to B at l}, l <= horizon.

    :param measure: invariant Markov measure
    :param markers: words of one length; B is the union of their cylinders at 0
    :param horizon: largest return time computed
    :return: (masses by return time, residual mass past the horizon, mass of B)
    """
    scan = MarkerScan(measure, markers)
    dist = scan.start()
    base = sum(dist.values(), start=measure.zero)
    masses: dict[int, Mass] = {}
    for gap in range(1, horizon + 1):
        if not dist:
            break
        dist, found = scan.step(dist)
        if found:
            masses[gap] = found
    residual = sum(dist.values(), start=measure.zero)
    return masses, residual, base
