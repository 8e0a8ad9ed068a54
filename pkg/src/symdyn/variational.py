"""The variational principle for an open cover, at finite resolution.

Good points are admissible words whose partition names have high block entropy
for every cylinder partition finer than the cover; their block statistics are
empirical invariant measures. ``evaluate_h_check`` compares the sup-inf and inf-sup
of partition entropies over a finite family of Markov measures with the cover
entropy. ``universal_rohlin`` builds one set B whose first n translates are
disjoint and cover all but delta of the mass of every measure in a family.

:author: Shay Hill
:created: 2024-03-18
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Any, Iterator, Sequence

from paragraphs import par

from symdyn.caps import DEFAULT_CAPS, Caps
from symdyn.cylinders import (
    CylinderUnion,
    PartitionSpec,
    block_partition,
    code_partition,
    refines,
)
from symdyn.entropy import (
    block_entropy,
    cover_entropy,
    partition_entropy_under_markov,
    phi,
)
from symdyn.errors import (
    ArgumentError,
    GoodPointNotFoundError,
    ResolutionTooCoarseError,
)
from symdyn.markers import ReturnLevel, find_marker, first_return_masses
from symdyn.measures import parry_measure
from symdyn.subshifts import SFT
from symdyn.towers import RohlinRule, TowerColumn, TowerDescription
from symdyn.validations import validate_tower
from symdyn.words import Word, WordLike, as_word, word_str

if TYPE_CHECKING:
    from symdyn.cylinders import CoverSpec
    from symdyn.measures import MarkovMeasure, Mass
    from symdyn.subshifts import Subshift

logger = logging.getLogger(__name__)


def _grouped_partition(subshift: Subshift, cover: CoverSpec) -> PartitionSpec:
    """L-blocks grouped by the first cover element holding them."""
    owner = {b: m[0] for b, m in cover.block_members.items()}
    width = cover.resolution
    cells: list[CylinderUnion] = []
    labels: list[str] = []
    for i, label in enumerate(cover.labels):
        words = [b for b, k in owner.items() if k == i]
        if words:
            cells.append(CylinderUnion(subshift.alphabet, 0, width, words))
            labels.append(label)
    return PartitionSpec(subshift, cells, labels)


def _partition_key(subshift: Subshift, partition: PartitionSpec, width: int) -> Any:
    blocks = subshift.language(width)
    return frozenset(
        frozenset(b for b in blocks if cell.allows(b, 0)) for cell in partition.cells
    )


def finer_partitions(
    subshift: Subshift, cover: CoverSpec, resolution: int
) -> list[tuple[str, PartitionSpec]]:
    """Distinct cylinder partitions of resolution <= R that refine the cover.

    The cover's own blocks grouped by first containing element come first, then
    the r-block partitions in increasing r.

    :raise ArgumentError: if none exists at this resolution
    """
    if resolution < 1:
        msg = f"partition resolution must be positive, not {resolution}"
        raise ArgumentError(msg)
    width = max(resolution, cover.resolution)
    found: list[tuple[str, PartitionSpec]] = []
    keys: set[Any] = set()
    candidates: list[tuple[str, PartitionSpec]] = []
    if cover.resolution <= resolution:
        candidates.append(("grouped", _grouped_partition(subshift, cover)))
    candidates.extend(
        (f"blocks({r})", block_partition(subshift, r)) for r in range(1, resolution + 1)
    )
    for name, partition in candidates:
        if not refines(partition, cover):
            continue
        key = _partition_key(subshift, partition, width)
        if key not in keys:
            keys.add(key)
            found.append((name, partition))
    if not found:
        msg = f"no cylinder partition of resolution <= {resolution} refines the cover"
        raise ArgumentError(msg)
    return found


@dataclass(frozen=True)
class GoodPointCertificate:
    """A word whose partition names all have block entropy above a target.

    ``bounds[(l, k)]`` is H_k(name of the point under partition l) / k.
    """

    point: Word
    window: int
    depth: int
    entropy: float
    target: float
    partitions: tuple[str, ...]
    bounds: dict[tuple[int, int], float]
    candidates: int

    @property
    def minimum(self) -> float:
        return min(self.bounds.values())

    def describe(self) -> dict[str, Any]:
        return {
            "window": self.window,
            "depth": self.depth,
            "entropy": self.entropy,
            "target": self.target,
            "partitions": list(self.partitions),
            "minimum": self.minimum,
            "candidates": self.candidates,
            "point_prefix": word_str(self.point[:64]),
        }


def _walk_weights(subshift: SFT) -> list[list[float]]:
    measure = parry_measure(subshift)
    return [[float(p) for p in row] for row in measure.transition]


def _candidates(
    subshift: Subshift, length: int, seed: int, caps: Caps
) -> Iterator[Word]:
    """Measure-weighted orbit windows first, then every admissible word in order."""
    count = caps.max_search_candidates
    if isinstance(subshift, SFT):
        weights = _walk_weights(subshift)
        for k in range(count):
            yield subshift.random_walk(length, seed + k, weights)
    else:
        caps.check("max_word_length", length * count, "good point orbit windows")
        stretch = subshift.orbit_segment(None, length * count)
        for k in range(count):
            yield stretch[k * length : (k + 1) * length]
    total = (
        subshift.count_words(length)
        if isinstance(subshift, SFT)
        else len(subshift.language(length))
    )
    if total * length > caps.max_states:
        logger.debug("skip exhaustive good point search: %d words", total)
        return
    yield from subshift.language(length)


def _bounds(
    subshift: Subshift,
    family: Sequence[tuple[str, PartitionSpec]],
    point: Word,
    window: int,
    depth: int,
    target: float | None,
) -> dict[tuple[int, int], float] | None:
    """Entropy rates of every name, or None once one falls below target."""
    found: dict[tuple[int, int], float] = {}
    for l, (_, partition) in enumerate(family, start=1):
        name = code_partition(subshift, partition, point, window)
        for k in range(1, min(depth, window) + 1):
            value = block_entropy(name, k) / k
            if target is not None and value < target:
                return None
            found[(l, k)] = value
    return found


def find_good_point(
    subshift: Subshift,
    cover: CoverSpec,
    depth: int,
    window: int,
    seed: int = 0,
    n_max: int = 8,
    caps: Caps = DEFAULT_CAPS,
) -> GoodPointCertificate:
    """A point whose names under every finer partition have high block entropy.

    With h the cover entropy estimate at n_max, the point x satisfies
    H_k(name_l(x)) >= k (h - 1/K) for every partition l of resolution <= K and
    every 1 <= k <= K.

    :param depth: K
    :param window: N, the length of each name
    :param seed: first walk seed
    :return: certificate with the point (length N + K) and every bound
    :raise GoodPointNotFoundError: if no candidate qualifies; retry at 2N
    """
    if depth < 1 or window < 1:
        msg = f"K and N must be positive, not {depth} and {window}"
        raise ArgumentError(msg)
    length = window + depth
    caps.check("max_word_length", length, "good point")
    entropy = cover_entropy(subshift, cover, n_max, caps).estimate
    family = finer_partitions(subshift, cover, depth)
    target = entropy - 1 / depth - caps.tolerance
    tried = 0
    for point in _candidates(subshift, length, seed, caps):
        tried += 1
        bounds = _bounds(subshift, family, point, window, depth, target)
        if bounds is None:
            continue
        logger.info(
            "good point for K=%d, N=%d after %d candidates", depth, window, tried
        )
        return GoodPointCertificate(
            point,
            window,
            depth,
            entropy,
            entropy - 1 / depth,
            tuple(name for name, _ in family),
            bounds,
            tried,
        )
    msg = par(
        f"""no point of {subshift.name} among {tried} candidates has names with
        block entropy rate >= {entropy - 1 / depth:.6f} for K={depth}, N={window}.
        Retry with N={2 * window}."""
    )
    raise GoodPointNotFoundError(msg, 2 * window)


@dataclass(frozen=True)
class EmpiricalMeasure:
    """k-block statistics of the first N shifts of a point.

    ``defect`` is the total variation distance between the two (k-1)-block
    marginals; a shift-invariant measure has defect 0.
    """

    order: int
    window: int
    counts: dict[Word, int]
    defect: Fraction

    def frequency(self, block: WordLike) -> Fraction:
        return Fraction(self.counts.get(as_word(block), 0), self.window)

    @property
    def frequencies(self) -> dict[Word, Fraction]:
        return {w: Fraction(c, self.window) for w, c in sorted(self.counts.items())}

    def entropy(self) -> float:
        return math.fsum(phi(f) for f in self.frequencies.values())

    @property
    def rate(self) -> float:
        return self.entropy() / self.order

    def describe(self) -> dict[str, Any]:
        return {
            "order": self.order,
            "window": self.window,
            "defect": str(self.defect),
            "rate": self.rate,
            "frequencies": {word_str(w): str(f) for w, f in self.frequencies.items()},
        }


def empirical_measure(
    subshift: Subshift, point: WordLike, window: int, order: int
) -> EmpiricalMeasure:
    """(1/N) sum of point masses at T^i x, i < N, seen through k-blocks.

    :param point: x, at least N + k symbols
    :param window: N
    :param order: k
    :raise ArgumentError: on a short or inadmissible point
    :raise ArithmeticError: if the defect passes 2k/N
    """
    x = as_word(point)
    if window < 1 or order < 1:
        msg = f"N and k must be positive, not {window} and {order}"
        raise ArgumentError(msg)
    if len(x) < window + order:
        msg = f"point of length {len(x)} is shorter than N + k = {window + order}"
        raise ArgumentError(msg)
    if not subshift.is_admissible(x[: window + order - 1]):
        msg = f"point is not admissible in {subshift.name}"
        raise ArgumentError(msg)
    counts = Counter(x[i : i + order] for i in range(window))
    defect = Fraction(0)
    if order > 1:
        left: Counter[Word] = Counter()
        right: Counter[Word] = Counter()
        for block, count in counts.items():
            left[block[:-1]] += count
            right[block[1:]] += count
        spread = sum(abs(left[u] - right[u]) for u in set(left) | set(right))
        defect = Fraction(spread, 2 * window)
    if defect > Fraction(2 * order, window):
        msg = f"empirical measure defect {defect} exceeds 2k/N"
        raise ArithmeticError(msg)
    return EmpiricalMeasure(order, window, dict(counts), defect)


@dataclass(frozen=True)
class AttainReport:
    """Good points and empirical measures along a schedule, with the final bound.

    ``bound`` is the least entropy rate of any finer partition's names at the
    last stage; ``certified`` says it reaches the cover entropy less tol.
    """

    stages: tuple[tuple[GoodPointCertificate, EmpiricalMeasure], ...]
    entropy: float
    bound: float
    tol: float
    certified: bool

    def describe(self) -> dict[str, Any]:
        return {
            "entropy": self.entropy,
            "bound": self.bound,
            "tol": self.tol,
            "certified": self.certified,
            "stages": [
                {"certificate": c.describe(), "measure": m.describe()}
                for c, m in self.stages
            ],
        }


def attain_cover_entropy(
    subshift: Subshift,
    cover: CoverSpec,
    schedule: Sequence[tuple[int, int]],
    seed: int = 0,
    tol: float = 0.05,
    n_max: int = 8,
    caps: Caps = DEFAULT_CAPS,
) -> AttainReport:
    """Empirical measures whose partition entropies reach the cover entropy.

    :param schedule: (K, N) pairs, increasing in both
    :raise ArgumentError: on an empty or non-increasing schedule
    :raise GoodPointNotFoundError: from any stage
    """
    if not schedule:
        msg = "schedule is empty"
        raise ArgumentError(msg)
    for (k0, n0), (k1, n1) in zip(schedule, schedule[1:]):
        if k1 < k0 or n1 <= n0:
            msg = f"schedule must increase: ({k0}, {n0}) then ({k1}, {n1})"
            raise ArgumentError(msg)
    stages: list[tuple[GoodPointCertificate, EmpiricalMeasure]] = []
    for depth, window in schedule:
        cert = find_good_point(subshift, cover, depth, window, seed, n_max, caps)
        stages.append((cert, empirical_measure(subshift, cert.point, window, depth)))
    last, _ = stages[-1]
    top = last.depth
    bound = min(v for (_, k), v in last.bounds.items() if k == top)
    certified = bound >= last.entropy - tol
    logger.info("cover entropy %.6f, attained bound %.6f", last.entropy, bound)
    return AttainReport(tuple(stages), last.entropy, bound, tol, certified)


@dataclass(frozen=True)
class VariationalReport:
    """Cover entropy beside sup-inf and inf-sup of partition entropies."""

    h_top: float
    h_top_upper: float
    h_check: float
    h_hat: float
    table: dict[str, dict[str, float]]
    family: tuple[str, ...]
    partitions: tuple[str, ...]
    resolution: int
    tol: float

    def describe(self) -> dict[str, Any]:
        return {
            "h_top": self.h_top,
            "h_top_upper": self.h_top_upper,
            "h_check": self.h_check,
            "h_hat": self.h_hat,
            "family": list(self.family),
            "partitions": list(self.partitions),
            "resolution": self.resolution,
            "tol": self.tol,
            "table": self.table,
        }


def evaluate_h_check(
    subshift: Subshift,
    cover: CoverSpec,
    family: Sequence[MarkovMeasure],
    resolution: int,
    n_max: int = 10,
    entropy_n: int | None = None,
    caps: Caps = DEFAULT_CAPS,
) -> VariationalReport:
    """max over measures of min over partitions of h_mu(alpha), and the reverse.

    :param family: Markov measures on subshift
    :param resolution: R, largest partition resolution
    :param n_max: cover entropy depth
    :param entropy_n: joint-entropy depth for partitions, default R + memory + 2
    :raise ArgumentError: if a measure is not a measure on subshift
    :raise ArithmeticError: if h_check > h_hat or h_hat > h_top, beyond tolerance
    """
    if not family:
        msg = "the measure family is empty"
        raise ArgumentError(msg)
    for measure in family:
        supported = measure.alphabet == subshift.alphabet and measure.is_supported_on(
            subshift
        )
        if not supported:
            msg = f"{measure.name} is not an invariant measure on {subshift.name}"
            raise ArgumentError(msg)
    top = cover_entropy(subshift, cover, n_max, caps)
    partitions = finer_partitions(subshift, cover, resolution)
    depth = entropy_n or resolution + max(m.block for m in family) + 2
    table: dict[str, dict[str, float]] = {}
    for measure in family:
        table[measure.name] = {
            name: partition_entropy_under_markov(
                subshift, partition, measure, depth, caps
            ).value
            for name, partition in partitions
        }
    names = [name for name, _ in partitions]
    h_check = max(min(row[n] for n in names) for row in table.values())
    h_hat = min(max(row[n] for row in table.values()) for n in names)
    tol = caps.tolerance
    if h_check > h_hat + tol or h_hat > top.estimate + tol:
        msg = par(
            f"""variational chain broken: h_check {h_check}, h_hat {h_hat}, cover
            entropy {top.estimate}."""
        )
        raise ArithmeticError(msg)
    return VariationalReport(
        top.estimate,
        top.upper_bound,
        h_check,
        h_hat,
        table,
        tuple(m.name for m in family),
        tuple(names),
        resolution,
        tol,
    )


def _visit_markers(
    subshift: Subshift,
    length: int,
    measures: Sequence[MarkovMeasure],
    caps: Caps,
) -> list[Word]:
    """Mutually overlap-free markers seen by every ergodic component."""
    markers = [find_marker(subshift, length, caps)]
    for measure in measures:
        for _, component in measure.ergodic_decomposition():
            if any(component.cylinder_mass(w) > 0 for w in markers):
                continue
            if len(markers) >= caps.max_search_candidates:
                msg = f"more than {len(markers)} markers needed"
                raise ArgumentError(msg)
            markers.append(
                find_marker(subshift, length, caps, measure=component, avoid=markers)
            )
    return markers


def universal_rohlin(
    subshift: Subshift,
    n: int,
    delta: Mass | str,
    measures: Sequence[MarkovMeasure],
    horizon: int | None = None,
    caps: Caps = DEFAULT_CAPS,
) -> TowerDescription:
    """B with B, TB, ..., T^(n-1) B disjoint and covering more than 1 - delta.

    A is a union of marker cylinders of length N = ceil(n / delta), so A has N
    disjoint iterates and mass at most 1/N. In the skyscraper over A, B takes
    every n-th level of each column below its last full stack of n. The levels
    left out number fewer than n per column, so they carry at most
    (n - 1) mu(A) < delta for every measure whose components all visit A.

    :param n: number of translates, n >= 2
    :param delta: 0 < delta < 1
    :param measures: Markov measures on subshift, none with atoms
    :return: a rohlin tower; notes hold the certified coverage per measure
    :raise ArgumentError: on bad n or delta
    :raise ResolutionTooCoarseError: if a measure has atoms (a periodic orbit has
        no Rohlin sets) or no marker of length N exists
    """
    gap = Fraction(str(delta)) if isinstance(delta, (float, str)) else Fraction(delta)
    if n < 2 or not 0 < gap < 1:
        msg = f"need n >= 2 and 0 < delta < 1, not n={n}, delta={gap}"
        raise ArgumentError(msg)
    if not measures:
        msg = "the measure family is empty"
        raise ArgumentError(msg)
    horizon = caps.horizon if horizon is None else horizon
    length = math.ceil(n / gap)
    for measure in measures:
        if measure.has_atoms:
            msg = f"{measure.name} has an atom on a periodic orbit"
            raise ResolutionTooCoarseError(msg)
        if not measure.is_supported_on(subshift):
            msg = f"{measure.name} is not a measure on {subshift.name}"
            raise ArgumentError(msg)
    markers = _visit_markers(subshift, length, measures, caps)
    coverage: dict[str, str] = {}
    coverage_float: dict[str, float] = {}
    tower_masses: dict[int, Mass] = {}
    tower_residual: Mass = Fraction(0)
    for k, measure in enumerate(measures):
        masses, residual, _ = first_return_masses(measure, markers, horizon)
        left_out = sum(
            ((height % n) * m for height, m in masses.items()), start=measure.zero
        )
        bound = 1 - left_out - (n - 1) * residual
        if not bound > 1 - gap:
            msg = f"coverage {bound} of {measure.name} is not above 1 - {gap}"
            raise ArithmeticError(msg)
        coverage[measure.name] = str(bound)
        coverage_float[measure.name] = float(bound)
        if k == 0:
            tower_masses, tower_residual = masses, residual
    marker_tuple = tuple(markers)
    columns = tuple(
        TowerColumn(
            n,
            tuple(ReturnLevel(marker_tuple, i * n, height) for i in range(height // n)),
            (height // n) * mass,
        )
        for height, mass in sorted(tower_masses.items())
    )
    tower = TowerDescription(
        "rohlin",
        RohlinRule(marker_tuple, subshift.alphabet, n),
        columns,
        (n,),
        horizon,
        tower_residual,
        all(m.exact for m in measures),
        measures[0].name,
        {
            "N": length,
            "delta": str(gap),
            "coverage": coverage,
            "coverage_float": coverage_float,
            "markers": [word_str(w) for w in markers],
        },
    )
    validate_tower(tower)
    logger.info(
        "rohlin set for n=%d, delta=%s on %s over %d markers of length %d",
        n,
        gap,
        subshift.name,
        len(markers),
        length,
    )
    return tower
