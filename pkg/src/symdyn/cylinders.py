"""Cylinder unions, covers, and partitions.

A CylinderUnion is a finite union of cylinders [w]_p = {x : x[p : p + |w|] = w},
stored as the set of words it allows on one window [lo, hi). The stored form is
canonical: every cylinder is expanded to the common window, then saturated end
coordinates (ones the set does not depend on) are dropped. Two unions describe the
same set of sequences iff their canonical forms are equal.

Covers and partitions are anchored at the origin (lo >= 0) and checked
exhaustively against the admissible blocks of one subshift.

:author: Shay Hill
:created: 2024-03-03
"""

from __future__ import annotations

import itertools as it
from functools import cached_property
from typing import TYPE_CHECKING, Iterable, Iterator, Sequence

from symdyn.caps import DEFAULT_CAPS, Caps
from symdyn.errors import ArgumentError
from symdyn.validations import validate_cover, validate_partition
from symdyn.words import Word, WordLike, as_word, check_alphabet, word_str

if TYPE_CHECKING:
    from symdyn.measures import InvariantMeasure, Mass
    from symdyn.subshifts import Subshift


def _pad(
    alphabet: int, word: Word, left: int, right: int, caps: Caps
) -> Iterator[Word]:
    caps.check("max_states", alphabet ** (left + right), "cylinder expansion")
    for head in it.product(range(alphabet), repeat=left):
        for tail in it.product(range(alphabet), repeat=right):
            yield (*head, *word, *tail)


class CylinderUnion:
    """A finite union of cylinders in canonical reduced form."""

    __slots__ = ("alphabet", "lo", "hi", "words", "caps")

    def __init__(
        self,
        alphabet: int,
        lo: int,
        hi: int,
        words: Iterable[Word],
        caps: Caps = DEFAULT_CAPS,
    ) -> None:
        """Store the words allowed on window [lo, hi), then reduce.

        :param alphabet: number of symbols
        :param lo: first coordinate of the window
        :param hi: one past the last coordinate
        :param words: words of length hi - lo
        :raise ArgumentError: if a word has the wrong length or symbols
        """
        found = frozenset(tuple(w) for w in words)
        for word in found:
            if len(word) != hi - lo:
                msg = f"word {word_str(word)} does not fill window [{lo}, {hi})"
                raise ArgumentError(msg)
            check_alphabet(word, alphabet)
        self.alphabet = alphabet
        self.caps = caps
        self.lo, self.hi, self.words = self._reduce(lo, hi, found)

    def _reduce(
        self, lo: int, hi: int, words: frozenset[Word]
    ) -> tuple[int, int, frozenset[Word]]:
        if not words:
            return 0, 0, frozenset()
        full = self.alphabet
        while hi > lo:
            heads: dict[Word, set[int]] = {}
            for w in words:
                heads.setdefault(w[1:], set()).add(w[0])
            if all(len(v) == full for v in heads.values()):
                words = frozenset(heads)
                lo += 1
                continue
            tails: dict[Word, set[int]] = {}
            for w in words:
                tails.setdefault(w[:-1], set()).add(w[-1])
            if all(len(v) == full for v in tails.values()):
                words = frozenset(tails)
                hi -= 1
                continue
            break
        if hi == lo:
            return 0, 0, words
        return lo, hi, words

    @classmethod
    def from_cylinders(
        cls,
        alphabet: int,
        cylinders: Iterable[tuple[int, WordLike]],
        caps: Caps = DEFAULT_CAPS,
    ) -> CylinderUnion:
        """Union of [w]_p over (p, w) pairs.

        :param alphabet: number of symbols
        :param cylinders: (position, word) pairs; an empty word is the whole space
        """
        items = [(p, as_word(w)) for p, w in cylinders]
        if not items:
            return cls(alphabet, 0, 0, (), caps)
        lo = min(p for p, _ in items)
        hi = max(p + len(w) for p, w in items)
        words: set[Word] = set()
        for p, w in items:
            words.update(_pad(alphabet, w, p - lo, hi - p - len(w), caps))
        return cls(alphabet, lo, hi, words, caps)

    @classmethod
    def cylinder(
        cls, alphabet: int, word: WordLike, position: int = 0, caps: Caps = DEFAULT_CAPS
    ) -> CylinderUnion:
        """The single cylinder [word]_position."""
        return cls.from_cylinders(alphabet, [(position, word)], caps)

    @classmethod
    def everything(cls, alphabet: int) -> CylinderUnion:
        """The whole space."""
        return cls(alphabet, 0, 0, [()])

    @property
    def is_everything(self) -> bool:
        """True if the union is the whole full shift."""
        return self.words == frozenset([()])

    @property
    def is_nothing(self) -> bool:
        """True if no sequence of the full shift is in the union."""
        return not self.words

    def expanded(self, lo: int, hi: int) -> frozenset[Word]:
        """Allowed words on a window containing the canonical one."""
        if self.is_nothing:
            return frozenset()
        if self.is_everything:
            return frozenset(
                _pad(self.alphabet, (), 0, max(hi - lo, 0), self.caps)
            )
        if lo > self.lo or hi < self.hi:
            msg = f"window [{lo}, {hi}) does not contain [{self.lo}, {self.hi})"
            raise ArgumentError(msg)
        left, right = self.lo - lo, hi - self.hi
        if not left and not right:
            return self.words
        found: set[Word] = set()
        for word in self.words:
            found.update(_pad(self.alphabet, word, left, right, self.caps))
        return frozenset(found)

    def allows(self, window: Sequence[int], lo: int) -> bool:
        """Membership of any point showing window at coordinates lo, lo + 1, ...

        :raise ArgumentError: if window does not cover [self.lo, self.hi)
        """
        if self.is_nothing:
            return False
        if self.is_everything:
            return True
        start, stop = self.lo - lo, self.hi - lo
        if start < 0 or stop > len(window):
            msg = _window_message(self.lo, self.hi, lo, len(window))
            raise ArgumentError(msg)
        return tuple(window[start:stop]) in self.words

    def contains(self, point: Sequence[int], origin: int = 0) -> bool:
        """Membership of the point whose coordinate 0 sits at point[origin]."""
        return self.allows(point, -origin)

    def preimage(self, k: int) -> CylinderUnion:
        """T^-k of the union: the points whose k-th shift lies in it."""
        if self.is_nothing or self.is_everything:
            return self
        return CylinderUnion(
            self.alphabet, self.lo + k, self.hi + k, self.words, self.caps
        )

    def shift(self, k: int) -> CylinderUnion:
        """T^k of the union."""
        return self.preimage(-k)

    def _common(self, other: CylinderUnion) -> tuple[int, int]:
        spans = [(u.lo, u.hi) for u in (self, other) if u.hi > u.lo]
        if not spans:
            return 0, 0
        return min(s[0] for s in spans), max(s[1] for s in spans)

    def union(self, other: CylinderUnion) -> CylinderUnion:
        lo, hi = self._common(other)
        words = self.expanded(lo, hi) | other.expanded(lo, hi)
        return CylinderUnion(self.alphabet, lo, hi, words, self.caps)

    def intersection(self, other: CylinderUnion) -> CylinderUnion:
        lo, hi = self._common(other)
        words = self.expanded(lo, hi) & other.expanded(lo, hi)
        return CylinderUnion(self.alphabet, lo, hi, words, self.caps)

    def complement(self) -> CylinderUnion:
        everything = frozenset(_pad(self.alphabet, (), 0, self.hi - self.lo, self.caps))
        return CylinderUnion(
            self.alphabet, self.lo, self.hi, everything - self.words, self.caps
        )

    def __or__(self, other: CylinderUnion) -> CylinderUnion:
        return self.union(other)

    def __and__(self, other: CylinderUnion) -> CylinderUnion:
        return self.intersection(other)

    def __invert__(self) -> CylinderUnion:
        return self.complement()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CylinderUnion):
            return NotImplemented
        return (self.alphabet, self.lo, self.hi, self.words) == (
            other.alphabet,
            other.lo,
            other.hi,
            other.words,
        )

    def __hash__(self) -> int:
        return hash((self.alphabet, self.lo, self.hi, self.words))

    def __repr__(self) -> str:
        return f"CylinderUnion({self.text()})"

    def text(self) -> str:
        """Readable form such as '[00]@0 | [01]@0'."""
        if self.is_nothing:
            return "{}"
        if self.is_everything:
            return "X"
        return " | ".join(f"[{word_str(w)}]@{self.lo}" for w in sorted(self.words))

    def cylinders(self) -> list[tuple[int, Word]]:
        """(position, word) pairs of the canonical form."""
        return [(self.lo, w) for w in sorted(self.words)]

    def admissible_words(self, subshift: Subshift) -> list[Word]:
        """Allowed words of the canonical window that occur in subshift."""
        if self.is_nothing:
            return []
        return [w for w in sorted(self.words) if subshift.is_admissible(w)]

    def is_empty_in(self, subshift: Subshift) -> bool:
        """True if no point of subshift lies in the union."""
        return not self.admissible_words(subshift)

    def mass(self, measure: InvariantMeasure) -> Mass:
        """Measure of the union under a shift-invariant measure."""
        total = sum(
            (measure.cylinder_mass(w) for w in sorted(self.words)),
            start=measure.zero,
        )
        return total

    def subset_of(self, other: CylinderUnion, subshift: Subshift) -> bool:
        """True if every point of subshift in self is also in other."""
        if self.is_nothing:
            return True
        lo, hi = self._common(other)
        mine = self.expanded(lo, hi)
        theirs = other.expanded(lo, hi)
        return all(w in theirs for w in mine if subshift.is_admissible(w))


def _window_message(lo: int, hi: int, start: int, size: int) -> str:
    stop = start + size
    return f"window [{start}, {stop}) does not cover cylinder window [{lo}, {hi})"


class CoverSpec:
    """A finite cover of a subshift by cylinder unions anchored at 0.

    ``resolution`` is the block length L on which every element is decided; the
    cover condition is checked on every admissible L-block.
    """

    def __init__(
        self,
        subshift: Subshift,
        elements: Sequence[CylinderUnion],
        labels: Sequence[str] | None = None,
    ) -> None:
        """
        :raise InvalidCoverError: if an element reaches left of 0 or an
            admissible block lies outside every element
        """
        self.subshift = subshift
        self.elements = tuple(elements)
        self.labels = tuple(labels) if labels else tuple(
            e.text() for e in self.elements
        )
        self.resolution = validate_cover(subshift, self.elements)

    @cached_property
    def block_members(self) -> dict[Word, tuple[int, ...]]:
        """For each admissible L-block, the elements containing it."""
        return {
            block: tuple(
                i for i, e in enumerate(self.elements) if e.allows(block, 0)
            )
            for block in self.subshift.language(self.resolution)
        }

    @property
    def is_partition(self) -> bool:
        """True if every admissible block lies in exactly one element."""
        return all(len(m) == 1 for m in self.block_members.values())

    def describe(self) -> dict[str, object]:
        return {
            "elements": list(self.labels),
            "resolution": self.resolution,
        }


class PartitionSpec(CoverSpec):
    """A cover whose elements, called cells, are pairwise disjoint on X."""

    def __init__(
        self,
        subshift: Subshift,
        cells: Sequence[CylinderUnion],
        labels: Sequence[str] | None = None,
    ) -> None:
        """
        :raise InvalidPartitionError: if cells overlap on an admissible block or
            miss one
        """
        validate_partition(subshift, tuple(cells))
        super().__init__(subshift, cells, labels)

    @property
    def cells(self) -> tuple[CylinderUnion, ...]:
        return self.elements

    @cached_property
    def cell_of(self) -> dict[Word, int]:
        """Cell index of each admissible L-block."""
        return {block: m[0] for block, m in self.block_members.items()}


def symbol_partition(subshift: Subshift) -> PartitionSpec:
    """Cells [a]_0 for every symbol a."""
    cells = [
        CylinderUnion.cylinder(subshift.alphabet, (a,), caps=subshift.caps)
        for a in range(subshift.alphabet)
    ]
    return PartitionSpec(subshift, cells, [str(a) for a in range(subshift.alphabet)])


def block_partition(subshift: Subshift, r: int) -> PartitionSpec:
    """Cells [w]_0 for every admissible r-block w.

    :raise ArgumentError: if r < 1
    """
    if r < 1:
        msg = f"block length must be positive, not {r}"
        raise ArgumentError(msg)
    blocks = subshift.language(r)
    cells = [
        CylinderUnion.cylinder(subshift.alphabet, b, caps=subshift.caps)
        for b in blocks
    ]
    return PartitionSpec(subshift, cells, [word_str(b) for b in blocks])


def trivial_cover(subshift: Subshift) -> CoverSpec:
    """The one-element cover {X}."""
    return CoverSpec(subshift, [CylinderUnion.everything(subshift.alphabet)], ["X"])


def code_partition(
    subshift: Subshift,
    partition: PartitionSpec,
    point: Sequence[int],
    length: int,
    origin: int = 0,
) -> Word:
    """The partition name of a point: cell indices of T^0 x, ..., T^(N-1) x.

    :param subshift: system the point belongs to
    :param partition: partition of that system
    :param point: word showing the point, coordinate 0 at point[origin]
    :param length: number of symbols N
    :param origin: index of coordinate 0 in point
    :return: word over range(len(partition.cells))
    :raise ArgumentError: if point is too short or shows an inadmissible block
    :raise InvalidPartitionError: if partition does not validate on subshift
    """
    if partition.subshift is not subshift:
        partition = PartitionSpec(subshift, partition.cells, partition.labels)
    width = partition.resolution
    needed = origin + length - 1 + width
    if len(point) < needed:
        msg = f"point of length {len(point)} is too short to code {length} symbols"
        raise ArgumentError(msg)
    name: list[int] = []
    for n in range(length):
        block = tuple(point[origin + n : origin + n + width])
        cell = partition.cell_of.get(block)
        if cell is None:
            msg = f"block {word_str(block)} at {n} is not admissible"
            raise ArgumentError(msg)
        name.append(cell)
    return tuple(name)


def refines(partition: PartitionSpec, cover: CoverSpec) -> bool:
    """True if every cell lies inside some element of the cover."""
    subshift = partition.subshift
    width = max(partition.resolution, cover.resolution)
    blocks = subshift.language(width)
    for cell in partition.cells:
        inside = [b for b in blocks if cell.allows(b, 0)]
        if not any(all(e.allows(b, 0) for b in inside) for e in cover.elements):
            return False
    return True
