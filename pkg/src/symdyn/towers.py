"""Towers over marker cylinders.

Every tower here starts from the Kakutani skyscraper over a base B: the column over
B_l = {x in B : first return to B at l} has levels T^i B_l, 0 <= i < l. A TowerRule
then cuts each skyscraper column into shorter columns. Two-height rules cut a column
of height l into blocks of N and N + 1; nested rules cut into blocks of a and a + 1
and slide every interior cut to the nearest base point of an earlier tower.

Rules act on concrete points: ``edges`` lists the positions where a column of the
tower starts, so return times along any orbit segment can be read off and checked.
Column lists are exact up to a return-time horizon; the mass past it is reported.

:author: Shay Hill
:created: 2024-03-14
"""

from __future__ import annotations

import bisect
import itertools as it
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Any, Sequence

import numpy as np
from paragraphs import par

from symdyn.caps import DEFAULT_CAPS, Caps
from symdyn.cylinders import CylinderUnion
from symdyn.errors import ArgumentError, PreconditionError
from symdyn.markers import MarkerScan, ReturnLevel, find_marker, first_return_masses
from symdyn.subshifts import SFT, graph_period, strong_components
from symdyn.validations import validate_tower
from symdyn.words import PatternAutomaton, Word, WordLike, as_word, word_str

if TYPE_CHECKING:
    from symdyn.cylinders import PartitionSpec
    from symdyn.measures import InvariantMeasure, MarkovMeasure, Mass
    from symdyn.subshifts import Subshift

logger = logging.getLogger(__name__)

# the nesting lemma wants n at least this multiple of the earlier tower's height
NEST_FACTOR = 2

# exact (Fraction) fiber statistics only below this many state-count cells
_EXACT_FIBER_BUDGET = 2_000_000


def two_height_blocks(length: int, size: int) -> tuple[int, int]:
    """(u, v) with size * u + (size + 1) * v = length, v < size.

    :raise PreconditionError: if length is too short to split
    """
    v = length % size
    u, rest = divmod(length - (size + 1) * v, size)
    if u < 0 or rest:
        msg = f"a column of height {length} cannot be cut into {size}s and {size + 1}s"
        raise PreconditionError(msg)
    return u, v


def _block_offsets(length: int, size: int) -> list[tuple[int, int]]:
    """(start, height) of each block; u blocks of size first, then v of size + 1."""
    u, v = two_height_blocks(length, size)
    heights = [size] * u + [size + 1] * v
    starts = [0, *it.accumulate(heights)][:-1]
    return list(zip(starts, heights))


class TowerRule(ABC):
    """Cuts the skyscraper over some markers into the columns of a tower."""

    def __init__(self, markers: Sequence[WordLike], alphabet: int) -> None:
        self.markers: tuple[Word, ...] = tuple(as_word(w) for w in markers)
        self.alphabet = alphabet
        self.automaton = PatternAutomaton(self.markers, alphabet)

    @property
    def width(self) -> int:
        return len(self.markers[0])

    def occurrences(self, point: Sequence[int]) -> list[int]:
        """Start positions of every marker occurrence in point."""
        return sorted({start for start, _ in self.automaton.find_all(point)})

    @abstractmethod
    def cuts(self, start: int, stop: int, inner: Sequence[int]) -> list[int]:
        """Column starts in the skyscraper column [start, stop).

        :param inner: edges of the parent tower inside [start, stop], if any
        :return: sorted positions, the first equal to start
        """

    def parent_edges(self, point: Sequence[int]) -> list[int]:
        return []

    def edges(self, point: Sequence[int]) -> list[int]:
        """Every column start decidable from point, in order."""
        found = self.occurrences(point)
        parent = self.parent_edges(point)
        edges: list[int] = []
        for start, stop in zip(found, found[1:]):
            lo = bisect.bisect_left(parent, start)
            hi = bisect.bisect_right(parent, stop)
            edges.extend(self.cuts(start, stop, parent[lo:hi]))
        if found:
            edges.append(found[-1])
        return edges

    def level_of(self, point: Sequence[int], origin: int = 0) -> tuple[int, int] | None:
        """(column height, level) of the point with coordinate 0 at point[origin].

        None if point does not show the column around origin.
        """
        edges = self.edges(point)
        k = bisect.bisect_right(edges, origin) - 1
        if k < 0 or k + 1 >= len(edges):
            return None
        return edges[k + 1] - edges[k], origin - edges[k]

    def orbit_return_times(self, point: Sequence[int]) -> list[int]:
        """Successive return times to the tower base along point."""
        edges = self.edges(point)
        return [b - a for a, b in zip(edges, edges[1:])]

    def describe(self) -> dict[str, Any]:
        return {
            "rule": type(self).__name__,
            "markers": [word_str(w) for w in self.markers],
        }


class SkyscraperRule(TowerRule):
    """Columns are the skyscraper columns themselves."""

    def cuts(self, start: int, stop: int, inner: Sequence[int]) -> list[int]:
        return [start]


class TwoHeightRule(TowerRule):
    """Cut each column into u blocks of N and v blocks of N + 1."""

    def __init__(self, markers: Sequence[WordLike], alphabet: int, size: int) -> None:
        super().__init__(markers, alphabet)
        self.size = size

    def cuts(self, start: int, stop: int, inner: Sequence[int]) -> list[int]:
        return [start + s for s, _ in _block_offsets(stop - start, self.size)]

    def describe(self) -> dict[str, Any]:
        return {**super().describe(), "size": self.size}


class NestedRule(TowerRule):
    """Blocks of a and a + 1 with each interior edge moved to the nearest parent
    edge, ties to the lower one."""

    def __init__(
        self,
        markers: Sequence[WordLike],
        alphabet: int,
        parent: TowerRule,
        size: int,
    ) -> None:
        super().__init__(markers, alphabet)
        self.parent = parent
        self.size = size

    def parent_edges(self, point: Sequence[int]) -> list[int]:
        return self.parent.edges(point)

    def cuts(self, start: int, stop: int, inner: Sequence[int]) -> list[int]:
        if not inner or inner[0] != start or inner[-1] != stop:
            msg = f"parent tower does not cover the column [{start}, {stop})"
            raise ArgumentError(msg)
        moved = [start]
        for offset, _ in _block_offsets(stop - start, self.size)[1:]:
            target = start + offset
            k = bisect.bisect_left(inner, target)
            below = inner[k - 1] if inner[k] != target else target
            above = inner[k]
            edge = below if target - below <= above - target else above
            if edge > moved[-1]:
                moved.append(edge)
        if moved[-1] == stop:
            moved.pop()
        return moved

    def describe(self) -> dict[str, Any]:
        return {
            **super().describe(),
            "size": self.size,
            "parent": self.parent.describe(),
        }


class RohlinRule(TowerRule):
    """Stacks of n levels at every n-th level of each skyscraper column.

    Levels above the last full stack of a column are left uncovered.
    """

    def __init__(self, markers: Sequence[WordLike], alphabet: int, n: int) -> None:
        super().__init__(markers, alphabet)
        self.n = n

    def cuts(self, start: int, stop: int, inner: Sequence[int]) -> list[int]:
        stacks = (stop - start) // self.n
        return [start + i * self.n for i in range(max(stacks, 1))]

    def level_of(self, point: Sequence[int], origin: int = 0) -> tuple[int, int] | None:
        """(n, j) if the point lies in T^j B, else None."""
        found = self.occurrences(point)
        k = bisect.bisect_right(found, origin) - 1
        if k < 0 or k + 1 >= len(found):
            return None
        offset = origin - found[k]
        if offset // self.n >= (found[k + 1] - found[k]) // self.n:
            return None
        return self.n, offset % self.n

    def describe(self) -> dict[str, Any]:
        return {**super().describe(), "n": self.n}


@dataclass(frozen=True)
class TowerColumn:
    """Pieces of the base sharing one column height, with their total mass."""

    height: int
    pieces: tuple[ReturnLevel, ...]
    mass: Mass

    def levels(self) -> list[ReturnLevel]:
        return [p.shifted(j) for p in self.pieces for j in range(self.height)]


@dataclass(frozen=True)
class TowerDescription:
    """A tower with its rule, columns up to a horizon, and possible heights.

    ``exact`` means the masses are rational and the height set and level
    disjointness are symbolic facts. It says nothing about how much of the space
    the listed columns reach; that is ``covered``, with ``residual`` the base mass
    past the horizon. Nested towers list no columns; their height window and base
    containment are certified along sample orbits.
    """

    kind: str
    rule: TowerRule
    columns: tuple[TowerColumn, ...]
    heights: tuple[int, ...]
    horizon: int
    residual: Mass
    exact: bool
    measure: str = ""
    notes: dict[str, Any] = field(default_factory=dict)

    @property
    def markers(self) -> tuple[Word, ...]:
        return self.rule.markers

    @property
    def max_height(self) -> int:
        return max(self.heights)

    def marker_base(self) -> CylinderUnion:
        """The skyscraper base: union of the marker cylinders at 0."""
        return CylinderUnion.from_cylinders(
            self.rule.alphabet, [(0, w) for w in self.markers]
        )

    @property
    def covered(self) -> Mass:
        """Mass of the union of the listed columns."""
        return sum((c.height * c.mass for c in self.columns), start=Fraction(0))

    def height_masses(self) -> dict[int, Mass]:
        totals: dict[int, Mass] = {}
        for column in self.columns:
            totals[column.height] = totals.get(column.height, 0) + column.mass
        return totals

    def describe(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "rule": self.rule.describe(),
            "heights": list(self.heights),
            "horizon": self.horizon,
            "residual": str(self.residual),
            "residual_float": float(self.residual),
            "covered": float(self.covered),
            "exact": self.exact,
            "measure": self.measure,
            "height_masses": {
                str(h): str(m) for h, m in sorted(self.height_masses().items())
            },
            **self.notes,
        }


@dataclass(frozen=True)
class ReturnTimeProfile:
    """Masses of B_l = {x in B : r_B(x) = l} for l up to the horizon."""

    base: str
    base_mass: Mass
    masses: dict[int, Mass]
    residual: Mass
    horizon: int

    @property
    def heights(self) -> list[int]:
        return sorted(self.masses)

    def conditional(self) -> dict[int, Mass]:
        """Return-time law given B."""
        return {h: m / self.base_mass for h, m in sorted(self.masses.items())}

    def describe(self) -> dict[str, Any]:
        return {
            "base": self.base,
            "base_mass": str(self.base_mass),
            "masses": {str(h): str(m) for h, m in sorted(self.masses.items())},
            "residual": str(self.residual),
            "horizon": self.horizon,
        }


def _base_words(
    subshift: Subshift, base: CylinderUnion | Sequence[WordLike]
) -> list[Word]:
    if not isinstance(base, CylinderUnion):
        return [as_word(w) for w in base]
    if base.alphabet != subshift.alphabet:
        msg = f"base {base.text()} is over alphabet {base.alphabet}"
        raise ArgumentError(msg)
    if base.is_nothing:
        msg = "the base of a tower cannot be empty"
        raise ArgumentError(msg)
    if not base.is_everything and base.lo != 0:
        msg = f"anchor the base at 0; {base.text()} starts at {base.lo}"
        raise ArgumentError(msg)
    return base.admissible_words(subshift)


def _confirm_supported(subshift: Subshift, measure: InvariantMeasure) -> None:
    if measure.alphabet != subshift.alphabet or not measure.is_supported_on(subshift):
        msg = f"{measure.name} is not a measure on {subshift.name}"
        raise ArgumentError(msg)


def return_times(
    subshift: Subshift,
    base: CylinderUnion,
    measure: MarkovMeasure,
    horizon: int | None = None,
    caps: Caps = DEFAULT_CAPS,
) -> ReturnTimeProfile:
    """Exact first-return masses to a cylinder union.

    :param subshift: the system
    :param base: B, anchored at 0
    :param measure: invariant Markov measure on subshift
    :param horizon: largest return time computed, default caps.horizon
    :return: masses of B_l and the residual, with sum + residual = mu(B)
    :raise ArgumentError: if mu(B) = 0
    """
    horizon = caps.horizon if horizon is None else horizon
    _confirm_supported(subshift, measure)
    words = [w for w in _base_words(subshift, base) if measure.cylinder_mass(w) > 0]
    if not words:
        msg = f"{base.text()} has measure zero under {measure.name}"
        raise ArgumentError(msg)
    if base.is_everything:
        one = measure.one
        return ReturnTimeProfile("X", one, {1: one}, measure.zero, horizon)
    masses, residual, base_mass = first_return_masses(measure, words, horizon)
    logger.debug(
        "return times to %s: %d heights up to %d", base.text(), len(masses), horizon
    )
    return ReturnTimeProfile(base.text(), base_mass, masses, residual, horizon)


def kakutani_skyscraper(
    subshift: Subshift,
    base: CylinderUnion | Sequence[WordLike],
    measure: MarkovMeasure,
    horizon: int | None = None,
    caps: Caps = DEFAULT_CAPS,
) -> TowerDescription:
    """The skyscraper over a cylinder union: one column per return time.

    :param base: B as a cylinder union anchored at 0, or a list of equal-length
        words
    :raise ArgumentError: if mu(B) = 0
    """
    horizon = caps.horizon if horizon is None else horizon
    _confirm_supported(subshift, measure)
    words = [w for w in _base_words(subshift, base) if measure.cylinder_mass(w) > 0]
    if not words or not words[0]:
        msg = "the skyscraper base must be a nonempty cylinder union of mass > 0"
        raise ArgumentError(msg)
    masses, residual, _ = first_return_masses(measure, words, horizon)
    markers = tuple(words)
    columns = tuple(
        TowerColumn(height, (ReturnLevel(markers, 0, height),), mass)
        for height, mass in sorted(masses.items())
    )
    tower = TowerDescription(
        "skyscraper",
        SkyscraperRule(markers, subshift.alphabet),
        columns,
        tuple(sorted(masses)),
        horizon,
        residual,
        measure.exact,
        measure.name,
    )
    validate_tower(tower)
    return tower


def system_period(subshift: Subshift) -> int:
    """gcd of the periods of the nontrivial components of an SFT, else 1."""
    if not isinstance(subshift, SFT):
        return 1
    period = 0
    for component in strong_components(subshift.adjacency):
        period = math.gcd(period, graph_period(subshift.adjacency, component))
    return period or 1


def _primitive_index(subshift: SFT) -> int | None:
    """Least k with A^k > 0, or None if the graph is not primitive."""
    size = len(subshift.states)
    for k in range(1, (size - 1) ** 2 + 2):
        if subshift.reach(k).all():
            return k
    return None


def _bridge(
    subshift: SFT,
    left: Sequence[int],
    right: Sequence[int],
    gap: int,
    rng: np.random.Generator,
) -> list[int]:
    """A random filler f with len(f) >= gap and left + f + right admissible."""
    m = subshift.block_length
    tail = subshift.last_states(tuple(left[-m:]))
    head = subshift.first_states(tuple(right[:m]))
    if not tail or not head:
        msg = "bridge ends are not admissible"
        raise ArgumentError(msg)
    start, target = tail[0], head[0]
    primitive = _primitive_index(subshift)
    for extra in range(len(subshift.states) * (m + 1) + 1):
        steps = gap + extra + m
        if subshift.reach(steps)[start, target]:
            break
    else:
        msg = f"{subshift.name} cannot join the two words"
        raise PreconditionError(msg)
    symbols: list[int] = []
    state = start
    for remaining in range(steps, 0, -1):
        free = primitive is not None and remaining - 1 >= primitive
        options = [
            (a, j)
            for a, j in enumerate(subshift.successor[state])
            if j >= 0 and (free or subshift.reach(remaining - 1)[j, target])
        ]
        a, state = options[int(rng.integers(len(options)))]
        symbols.append(a)
    return symbols[: steps - m]


def sample_point(
    subshift: Subshift, markers: Sequence[WordLike], copies: int = 3, seed: int = 0
) -> Word:
    """An admissible word holding at least copies + 1 marker occurrences.

    SFT points are marker copies joined by random admissible fillers; other
    systems contribute a long stretch of their own orbit.
    """
    words = [as_word(w) for w in markers]
    width = len(words[0])
    if isinstance(subshift, SFT):
        rng = np.random.default_rng(seed)
        point = list(words[0])
        for k in range(copies):
            nxt = words[(k + 1) % len(words)]
            gap = int(rng.integers(0, width + 1))
            point.extend(_bridge(subshift, point, nxt, gap, rng))
            point.extend(nxt)
        return tuple(point)
    length = 8 * width * (copies + 1)
    subshift.caps.check("max_word_length", length, "sample orbit")
    return subshift.orbit_segment(seed, length)


@dataclass(frozen=True)
class OrbitCheck:
    """Return times read along a sample point and whether they fit the tower."""

    return_times: tuple[int, ...]
    within_heights: bool
    inside_parent: bool


def check_orbit(
    tower: TowerDescription, point: Sequence[int], parent: TowerRule | None = None
) -> OrbitCheck:
    """Read a tower along a point.

    :param parent: if given, every edge must also be an edge of this tower
    """
    edges = tower.rule.edges(point)
    times = tuple(b - a for a, b in zip(edges, edges[1:]))
    allowed = set(tower.heights)
    inside = True
    if parent is not None:
        parent_edges = set(parent.edges(point))
        inside = all(e in parent_edges for e in edges)
    return OrbitCheck(times, all(t in allowed for t in times), inside)


def _certify(
    subshift: Subshift,
    tower: TowerDescription,
    parent: TowerRule | None = None,
    seeds: Sequence[int] = (0, 1),
) -> None:
    for seed in seeds:
        point = sample_point(subshift, tower.markers, seed=seed)
        check = check_orbit(tower, point, parent)
        if not check.within_heights or not check.inside_parent:
            msg = par(
                f"""{tower.kind} tower failed on a sample orbit (seed {seed}):
                return times {sorted(set(check.return_times))}, allowed
                {list(tower.heights)}, inside parent {check.inside_parent}."""
            )
            raise ArithmeticError(msg)


def kr_two_heights(
    subshift: Subshift,
    measure: MarkovMeasure,
    size: int,
    horizon: int | None = None,
    caps: Caps = DEFAULT_CAPS,
) -> TowerDescription:
    """A Kakutani-Rohlin tower whose base has return times N and N + 1 only.

    The skyscraper is built over an unbordered marker of length 10 N^2 + 1, so
    every return time l exceeds 10 N^2 and splits as N u + (N + 1) v. The heights
    are always (N, N + 1); with N = 1 every block has height 1 and the column of
    height 2 carries no mass.

    :param size: N >= 1
    :raise ArgumentError: if N < 1
    :raise ResolutionTooCoarseError: if no marker of that length exists, as in
        periodic systems
    """
    if size < 1:
        msg = f"tower height N must be at least 1, not {size}"
        raise ArgumentError(msg)
    horizon = caps.horizon if horizon is None else horizon
    _confirm_supported(subshift, measure)
    length = 10 * size**2 + 1
    marker = find_marker(subshift, length, caps, measure=measure)
    rule = TwoHeightRule((marker,), subshift.alphabet, size)
    masses, residual, _ = first_return_masses(measure, [marker], horizon)
    pieces: dict[int, list[ReturnLevel]] = {}
    mass_by_height: dict[int, Mass] = {}
    for gap, mass in sorted(masses.items()):
        u, v = two_height_blocks(gap, size)
        if size * u + (size + 1) * v != gap:
            msg = f"column {gap} split as {u} x {size} + {v} x {size + 1}"
            raise ArithmeticError(msg)
        for start, height in _block_offsets(gap, size):
            pieces.setdefault(height, []).append(ReturnLevel((marker,), start, gap))
            mass_by_height[height] = mass_by_height.get(height, measure.zero) + mass
    columns = tuple(
        TowerColumn(h, tuple(pieces[h]), mass_by_height[h]) for h in sorted(pieces)
    )
    heights = (size, size + 1)
    tower = TowerDescription(
        "kakutani-rohlin",
        rule,
        columns,
        heights,
        horizon,
        residual,
        measure.exact,
        measure.name,
        {"marker_length": length, "period": system_period(subshift)},
    )
    validate_tower(tower)
    _certify(subshift, tower)
    logger.info(
        "two-height tower N=%d on %s over a marker of length %d",
        size,
        subshift.name,
        length,
    )
    return tower


def nest_tower(
    subshift: Subshift,
    outer: TowerDescription,
    n: int,
    measure: MarkovMeasure | None = None,
    caps: Caps = DEFAULT_CAPS,
) -> TowerDescription:
    """A bounded K-R tower with base inside the base of outer, heights in [n, n+4H].

    H is the height of outer. An auxiliary marker of length 10(n + 2H)^2 + 1
    starting with outer's marker gives long columns; these are cut into blocks of
    a = n + 2 floor(H/2) and a + 1, and each interior cut slides to the nearest
    base point of outer, moving it at most floor(H/2).

    :param outer: a bounded K-R tower (two-height or nested)
    :param n: least height wanted, at least NEST_FACTOR * H
    :param measure: if given, the auxiliary marker has positive mass under it
    :raise ArgumentError: if outer is not a bounded K-R tower or n is too small
    """
    if outer.kind not in ("kakutani-rohlin", "nested"):
        msg = f"nesting needs a bounded Kakutani-Rohlin tower, not a {outer.kind}"
        raise ArgumentError(msg)
    top = outer.max_height
    if n < NEST_FACTOR * top:
        msg = f"n = {n} is below {NEST_FACTOR} x the outer height {top}"
        raise ArgumentError(msg)
    slack = top // 2
    size = n + 2 * slack
    length = 10 * (n + 2 * top) ** 2 + 1
    marker = find_marker(
        subshift, length, caps, measure=measure, prefix=outer.markers[0]
    )
    rule = NestedRule((marker,), subshift.alphabet, outer.rule, size)
    low, high = size - 2 * slack, size + 1 + 2 * slack
    if low < n or high > n + 4 * top:
        msg = f"height window [{low}, {high}] leaves [{n}, {n + 4 * top}]"
        raise ArithmeticError(msg)
    tower = TowerDescription(
        "nested",
        rule,
        (),
        tuple(range(low, high + 1)),
        0,
        Fraction(0),
        outer.exact,
        outer.measure,
        {"marker_length": length, "block": size, "outer_height": top},
    )
    _certify(subshift, tower, parent=outer.rule)
    logger.info(
        "nested tower on %s: heights in [%d, %d] over a marker of length %d",
        subshift.name,
        low,
        high,
        length,
    )
    return tower


@dataclass(frozen=True)
class FiberReport:
    """Mass of the fibers whose f-average is within eps of mu(f)."""

    fraction: Mass
    covered: Mass
    residual: Mass
    mean: Mass
    eps: Mass
    exact: bool


def _fiber_values(
    f: CylinderUnion, measure: MarkovMeasure
) -> tuple[list[int], int]:
    width = max(f.hi, 1)
    if f.lo < 0:
        msg = f"{f.text()} reaches left of 0"
        raise ArgumentError(msg)
    if width > measure.block:
        msg = par(
            f"""{f.text()} looks at {width} symbols but {measure.name} remembers
            {measure.block}; use a higher-block presentation of the measure."""
        )
        raise ArgumentError(msg)
    values = [
        int(f.is_everything or f.allows(s[measure.block - width :], 0))
        for s in measure.states
    ]
    return values, width


def good_fiber_fraction(
    subshift: Subshift,
    tower: TowerDescription,
    f: CylinderUnion,
    measure: MarkovMeasure,
    eps: Mass | str,
    n0: int | None = None,
) -> FiberReport:
    """Mass of the skyscraper fibers {T^i x : 0 <= i < r(x)} with good f-average.

    A chain run jointly with the marker automaton carries the running count of
    f along each fiber; when the next marker completes, the count of windows
    inside that marker is removed.

    :param tower: a skyscraper
    :param f: indicator, a cylinder union anchored at 0 no wider than the
        measure's memory
    :param eps: tolerance on the fiber average
    :param n0: if the shortest column reaches n0, a fraction below 1 - eps raises
    :raise ArgumentError: on a non-skyscraper tower or a too-wide f
    """
    if tower.kind != "skyscraper":
        msg = f"fiber statistics need a skyscraper, not a {tower.kind} tower"
        raise ArgumentError(msg)
    _confirm_supported(subshift, measure)
    tol = Fraction(str(eps)) if isinstance(eps, (float, str)) else Fraction(eps)
    mean = f.mass(measure) if not f.is_everything else measure.one
    values, width = _fiber_values(f, measure)
    scan = MarkerScan(measure, tower.markers)
    markers = scan.markers
    marker_width = len(markers[0])
    if marker_width < width:
        msg = f"markers of length {marker_width} are shorter than f's window"
        raise ArgumentError(msg)
    inside = [
        sum(
            int(f.is_everything or f.allows(w[i : i + width], 0))
            for i in range(marker_width - width + 1)
        )
        for w in markers
    ]
    horizon = tower.horizon
    size_s, size_q = len(measure.states), scan.automaton.size
    size_c = horizon + marker_width + 2
    exact = measure.exact and size_s * size_q * size_c * horizon <= _EXACT_FIBER_BUDGET
    dtype = object if exact else float
    zero = measure.zero if exact else 0.0
    dist = np.full((size_s, size_q, size_c), zero, dtype=dtype)
    automaton = scan.automaton
    for k, word in enumerate(markers):
        mass = measure.cylinder_mass(word)
        if mass:
            state = measure.index[word[-measure.block :]]
            cell = (state, automaton.run(word), inside[k])
            dist[cell] += mass if exact else float(mass)
    hit_of = [inside[h[0]] if h else -1 for h in automaton.hits]
    counts = np.arange(size_c)
    good = zero
    covered = zero
    for gap in range(1, horizon + 1):
        new = np.full_like(dist, zero)
        for i in range(size_s):
            if not dist[i].any():
                continue
            for a, j in enumerate(measure.successor[i]):
                if j < 0:
                    continue
                p = measure.transition[i][j]
                moved = dist[i] * (p if exact else float(p))
                if values[j]:
                    moved = np.concatenate(
                        [np.full((size_q, 1), zero, dtype=dtype), moved[:, :-1]], axis=1
                    )
                for q in range(size_q):
                    nq = automaton.delta[q][a]
                    if hit_of[nq] < 0:
                        new[j, nq] += moved[q]
                        continue
                    sums = counts - hit_of[nq]
                    if exact:
                        ok = [abs(Fraction(int(s), gap) - mean) <= tol for s in sums]
                    else:
                        ok = np.abs(sums / gap - float(mean)) <= float(tol) + 1e-12
                    row = moved[q]
                    covered += gap * row.sum()
                    good += gap * row[np.asarray(ok, dtype=bool)].sum()
        dist = new
    residual = dist.sum()
    report = FiberReport(good, covered, residual, mean, tol, exact)
    shortest = min(tower.heights) if tower.heights else 0
    if n0 is not None and shortest >= n0 and good + (1 - covered) < 1 - tol:
        msg = f"fiber fraction {float(good)} below 1 - {float(tol)} past n0 = {n0}"
        raise ArithmeticError(msg)
    return report


@dataclass(frozen=True)
class ErgThreshold:
    """Constructive n0 for the good-fiber bound: windows of length ``window``
    have f-average within delta of mu(f) off a set of mass at most delta."""

    eps: Mass
    delta: Mass
    window: int | None
    n0: int | None
    bad_mass: float


def erg_threshold(
    subshift: Subshift,
    f: CylinderUnion,
    measure: MarkovMeasure,
    eps: Mass | str,
    window_cap: int = 4096,
) -> ErgThreshold:
    """delta = (eps / 11)^2, the least window N with bad mass <= delta, n0 = N / delta.

    Window-sum distributions are computed in floats.
    """
    _confirm_supported(subshift, measure)
    tol = Fraction(str(eps)) if isinstance(eps, (float, str)) else Fraction(eps)
    delta = (tol / 11) ** 2
    mean = float(measure.one if f.is_everything else f.mass(measure))
    values, width = _fiber_values(f, measure)
    block = measure.block
    size_s = len(measure.states)
    first = block - width + 1
    dist = np.zeros((size_s, window_cap + block + 1))
    for j, state in enumerate(measure.states):
        head = sum(
            int(f.is_everything or f.allows(state[i : i + width], 0))
            for i in range(first)
        )
        dist[j, head] += float(measure.stationary[j])
    windows = first
    bad = 1.0
    while windows <= window_cap:
        sums = np.arange(dist.shape[1])
        far = np.abs(sums / windows - mean) > float(delta)
        bad = float(dist[:, far].sum())
        if bad <= float(delta):
            n0 = math.ceil(windows / delta)
            return ErgThreshold(tol, delta, windows, n0, bad)
        new = np.zeros_like(dist)
        for i in range(size_s):
            for j in measure.successor[i]:
                if j < 0:
                    continue
                p = float(measure.transition[i][j])
                if values[j]:
                    new[j, 1:] += p * dist[i, :-1]
                else:
                    new[j] += p * dist[i]
        dist = new
        windows += 1
    return ErgThreshold(tol, delta, None, None, bad)


@dataclass(frozen=True)
class UniformityReport:
    """Worst deviation of window averages from cell masses, per window length."""

    labels: tuple[str, ...]
    order: int
    mode: str
    deviations: dict[int, float]
    witnesses: dict[int, str]
    windows: dict[int, int]

    def describe(self) -> dict[str, Any]:
        return {
            "cells": list(self.labels),
            "order": self.order,
            "mode": self.mode,
            "deviations": {str(n): d for n, d in sorted(self.deviations.items())},
            "witnesses": {str(n): w for n, w in sorted(self.witnesses.items())},
            "windows": {str(n): c for n, c in sorted(self.windows.items())},
        }


def _periodic_windows(subshift: Subshift, length: int, period: int) -> list[Word]:
    found: list[Word] = []
    for p in range(1, period + 1):
        for cycle in it.product(range(subshift.alphabet), repeat=p):
            word = (cycle * (length // p + 1))[:length]
            head = (cycle * (4 * p + 8))[: min(length, 4 * p + 8)]
            if subshift.is_admissible(head) and subshift.is_admissible(word):
                found.append(word)
    return found


def _sample_windows(
    subshift: Subshift, length: int, samples: int, seed: int
) -> list[Word]:
    """Periodic windows of period <= 4 and seeded orbit windows."""
    windows = set(_periodic_windows(subshift, length, 4))
    for k in range(samples):
        if isinstance(subshift, SFT):
            windows.add(subshift.random_walk(length, seed + k))
        else:
            stretch = subshift.orbit_segment(seed, length * (k + 1))
            windows.add(stretch[length * k :])
    return sorted(windows)


def uniformity_defect(
    subshift: Subshift,
    partition: PartitionSpec,
    measure: InvariantMeasure,
    lengths: Sequence[int],
    mode: str = "exhaustive",
    samples: int = 16,
    seed: int = 0,
    order: int = 1,
    caps: Caps = DEFAULT_CAPS,
) -> UniformityReport:
    """max over windows and cells of |(1/N) #visits - mu(cell)|.

    Cells are the names of the partition over ``order`` consecutive times.
    Exhaustive mode scans every admissible window; sampled mode scans periodic
    orbits of period <= 4 and seeded orbit windows, and is a lower bound.

    :raise ArgumentError: on an unknown mode or a non-positive length
    :raise ResourceCapError: if the exhaustive scan exceeds caps.max_states symbols
    """
    if mode not in ("exhaustive", "sampled"):
        msg = f"mode must be exhaustive or sampled, not {mode}"
        raise ArgumentError(msg)
    if any(n < 1 for n in lengths) or order < 1:
        msg = f"window lengths and order must be positive, not {list(lengths)}"
        raise ArgumentError(msg)
    width = partition.resolution
    cells = partition.cell_of
    name_mass: dict[Word, float] = {}
    for block, mass in measure.block_distribution(order + width - 1).items():
        name = tuple(cells[block[j : j + width]] for j in range(order))
        name_mass[name] = name_mass.get(name, 0.0) + float(mass)
    deviations: dict[int, float] = {}
    witnesses: dict[int, str] = {}
    scanned: dict[int, int] = {}
    for n in lengths:
        length = n + order + width - 2
        if mode == "exhaustive":
            count = (
                subshift.count_words(length)
                if isinstance(subshift, SFT)
                else len(subshift.language(length))
            )
            caps.check("max_states", count * length, f"windows of length {length}")
            windows = list(subshift.language(length))
        else:
            windows = _sample_windows(subshift, length, samples, seed)
        worst, witness = 0.0, ""
        for window in windows:
            coded = [cells[window[i : i + width]] for i in range(n + order - 1)]
            seen: dict[Word, int] = {}
            for i in range(n):
                key = tuple(coded[i : i + order])
                seen[key] = seen.get(key, 0) + 1
            for name in set(seen) | set(name_mass):
                gap = abs(seen.get(name, 0) / n - name_mass.get(name, 0.0))
                if gap > worst:
                    worst, witness = gap, word_str(window)
        deviations[n] = worst
        witnesses[n] = witness
        scanned[n] = len(windows)
        logger.debug("uniformity at N=%d: %.6f over %d windows", n, worst, len(windows))
    return UniformityReport(
        tuple(partition.labels), order, mode, deviations, witnesses, scanned
    )
