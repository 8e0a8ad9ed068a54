"""Block entropies, cover entropies, and measure entropies.

Natural logarithms throughout; ``bits`` converts for reports.

:author: Shay Hill
:created: 2024-03-10
"""

from __future__ import annotations

import itertools as it
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Sequence

import numpy as np
from paragraphs import par

from symdyn.caps import DEFAULT_CAPS, Caps
from symdyn.errors import ArgumentError
from symdyn.setcover import min_set_cover
from symdyn.subshifts import SFT, strong_components
from symdyn.words import Word, WordLike, as_word

if TYPE_CHECKING:
    from symdyn.cylinders import CoverSpec, PartitionSpec
    from symdyn.measures import InvariantMeasure, MarkovMeasure, Mass
    from symdyn.subshifts import Subshift

logger = logging.getLogger(__name__)

_TOL = 1e-9


def phi(t: float | Fraction) -> float:
    """-t log t, with phi(0) = 0."""
    value = float(t)
    if value < 0 or value > 1 + _TOL:
        msg = f"phi is defined on [0, 1], not at {value}"
        raise ArgumentError(msg)
    if value == 0:
        return 0.0
    return -value * math.log(value)


def bits(nats: float) -> float:
    """Convert nats to bits."""
    return nats / math.log(2)


@dataclass(frozen=True)
class BlockDistribution:
    """Frequencies of the k-blocks of a word, over its n - k + 1 windows."""

    order: int
    counts: dict[Word, int]
    windows: int

    def frequency(self, block: WordLike) -> Fraction:
        return Fraction(self.counts.get(as_word(block), 0), self.windows)

    @property
    def frequencies(self) -> dict[Word, Fraction]:
        return {w: Fraction(c, self.windows) for w, c in sorted(self.counts.items())}

    def entropy(self) -> float:
        """H_k = sum of phi over the frequencies."""
        return math.fsum(phi(f) for f in self.frequencies.values())


def block_frequencies(word: WordLike, k: int) -> BlockDistribution:
    """Exact frequencies of k-blocks in word.

    :param word: any word of length n >= k
    :param k: block length, k >= 1
    :raise ArgumentError: unless 1 <= k <= len(word)
    """
    word = as_word(word)
    if not 1 <= k <= len(word):
        msg = f"block length {k} outside [1, {len(word)}]"
        raise ArgumentError(msg)
    windows = len(word) - k + 1
    counts = Counter(word[i : i + k] for i in range(windows))
    return BlockDistribution(k, dict(counts), windows)


def block_entropy(word: WordLike, k: int, alphabet: int | None = None) -> float:
    """H_k(word) in nats.

    :param alphabet: if given, 0 <= H_k <= k log(alphabet) is asserted
    """
    value = block_frequencies(word, k).entropy()
    if alphabet is not None and not -_TOL <= value <= k * math.log(alphabet) + _TOL:
        msg = f"block entropy {value} outside [0, {k} log {alphabet}]"
        raise ArithmeticError(msg)
    return value


def count_low_entropy_words(
    alphabet: int, n: int, k: int, h: float, caps: Caps = DEFAULT_CAPS
) -> int:
    """Number of words w of length n over the alphabet with H_k(w) <= k h.

    Exhaustive, vectorized over chunks of words.

    :raise ArgumentError: unless alphabet >= 2, 1 <= k <= n, h >= 0
    :raise ResourceCapError: if alphabet**n exceeds caps.max_states
    """
    if alphabet < 2 or not 1 <= k <= n or h < 0:
        msg = f"need alphabet >= 2, 1 <= k <= n, h >= 0; got {alphabet}, {k}, {n}, {h}"
        raise ArgumentError(msg)
    total = alphabet**n
    caps.check("max_states", total, f"all words of length {n}")
    windows = n - k + 1
    kinds = alphabet**k
    chunk = max(1, min(1 << 16, (1 << 22) // kinds))
    powers = alphabet ** np.arange(n - 1, -1, -1, dtype=np.int64)
    block_powers = alphabet ** np.arange(k - 1, -1, -1, dtype=np.int64)
    limit = k * h + _TOL
    found = 0
    for start in range(0, total, chunk):
        codes = np.arange(start, min(start + chunk, total), dtype=np.int64)
        digits = (codes[:, None] // powers[None, :]) % alphabet
        blocks = np.stack(
            [digits[:, i : i + k] @ block_powers for i in range(windows)], axis=1
        )
        counts = np.zeros((len(codes), kinds), dtype=np.int64)
        rows = np.repeat(np.arange(len(codes)), windows)
        np.add.at(counts, (rows, blocks.ravel()), 1)
        freqs = counts / windows
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(counts > 0, -freqs * np.log(freqs), 0.0)
        found += int((terms.sum(axis=1) <= limit).sum())
    return found


@dataclass(frozen=True)
class LemmaRow:
    n: int
    count: int
    bound: int
    holds: bool
    reverse_bound: float
    reverse_holds: bool


@dataclass(frozen=True)
class LemmaTable:
    """Counts of low-entropy words against exp(n(h + eps)) over a range of n.

    ``threshold`` is the smallest n in range from which the bound holds for every
    later n in range, or None if it fails at the last n. The reverse bound
    exp(n(h - eps)) is reported only.
    """

    alphabet: int
    k: int
    h: float
    eps: float
    rows: tuple[LemmaRow, ...]
    threshold: int | None


def low_entropy_table(
    alphabet: int,
    n_range: Sequence[int],
    k: int,
    h: float,
    eps: float,
    caps: Caps = DEFAULT_CAPS,
) -> LemmaTable:
    """count_low_entropy_words across n with the bound comparisons."""
    if eps <= 0:
        msg = f"eps must be positive, not {eps}"
        raise ArgumentError(msg)
    rows: list[LemmaRow] = []
    for n in sorted(set(n_range)):
        if n < k:
            continue
        count = count_low_entropy_words(alphabet, n, k, h, caps)
        bound = math.floor(math.exp(n * (h + eps)))
        reverse = math.exp(n * (h - eps))
        holds, reverse_holds = count <= bound, count >= reverse
        rows.append(LemmaRow(n, count, bound, holds, reverse, reverse_holds))
    threshold: int | None = None
    for row in reversed(rows):
        if not row.holds:
            break
        threshold = row.n
    return LemmaTable(alphabet, k, h, eps, tuple(rows), threshold)


def _join_sets(
    subshift: Subshift, cover: CoverSpec, n: int, caps: Caps
) -> tuple[list[int], int]:
    """Elements of the n-fold join as bitmasks over admissible blocks.

    Blocks have length n + L - 1. Element (i_0 .. i_(n-1)) contains block b when
    b[j : j + L] lies in cover element i_j for every j.
    """
    width = cover.resolution
    blocks = subshift.language(n + width - 1)
    members = cover.block_members
    sets: dict[tuple[int, ...], int] = {}
    incidences = 0
    for idx, block in enumerate(blocks):
        choices = [members[block[j : j + width]] for j in range(n)]
        incidences += math.prod(len(c) for c in choices)
        caps.check("max_states", incidences, "join incidences")
        for name in it.product(*choices):
            sets[name] = sets.get(name, 0) | (1 << idx)
    return list(sets.values()), (1 << len(blocks)) - 1


def _names_are_blocks(cover: CoverSpec) -> bool:
    """True if every cover element holds exactly one admissible L-block."""
    members = cover.block_members
    if not all(len(m) == 1 for m in members.values()):
        return False
    return len({m[0] for m in members.values()}) == len(members)


def min_subcover_count(
    subshift: Subshift, cover: CoverSpec, n: int, caps: Caps = DEFAULT_CAPS
) -> int:
    """Minimum size of a subcover of the n-fold join of the cover, restricted to X.

    :raise ArgumentError: if n < 1
    :raise ResourceCapError: on block or node caps
    """
    if n < 1:
        msg = f"n must be positive, not {n}"
        raise ArgumentError(msg)
    width = cover.resolution
    if _names_are_blocks(cover):
        if isinstance(subshift, SFT):
            return subshift.count_words(n + width - 1)
        return len(subshift.language(n + width - 1))
    if cover.is_partition:
        blocks = subshift.language(n + width - 1)
        cell = cover.block_members
        return len({tuple(cell[b[j : j + width]][0] for j in range(n)) for b in blocks})
    sets, universe = _join_sets(subshift, cover, n, caps)
    return min_set_cover(sets, universe, caps.max_cover_nodes).size


@dataclass(frozen=True)
class CoverEntropy:
    """Per-n values (1/n) log r_n of the minimal subcover counts.

    ``estimate`` is the value at n_max, ``upper_bound`` the least value (Fekete),
    ``growth`` the slope of log r_n over the second half of the range.
    """

    counts: dict[int, int]
    values: dict[int, float]
    estimate: float
    upper_bound: float
    growth: float
    resolution: int

    def table(self) -> list[dict[str, float | int]]:
        return [
            {
                "n": n,
                "r": self.counts[n],
                "nats": self.values[n],
                "bits": bits(self.values[n]),
            }
            for n in sorted(self.counts)
        ]


def cover_entropy(
    subshift: Subshift, cover: CoverSpec, n_max: int, caps: Caps = DEFAULT_CAPS
) -> CoverEntropy:
    """Finite estimates of the topological entropy of a cover."""
    if n_max < 1:
        msg = f"n_max must be positive, not {n_max}"
        raise ArgumentError(msg)
    counts = {
        n: min_subcover_count(subshift, cover, n, caps) for n in range(1, n_max + 1)
    }
    values = {n: math.log(r) / n for n, r in counts.items()}
    half = -(-n_max // 2)
    if n_max > half:
        growth = (math.log(counts[n_max]) - math.log(counts[half])) / (n_max - half)
    else:
        growth = values[n_max]
    logger.debug("cover entropy of %s: r_n = %s", subshift.name, counts)
    return CoverEntropy(
        counts,
        values,
        values[n_max],
        min(values.values()),
        max(growth, 0.0),
        cover.resolution,
    )


def spectral_radius(adjacency: np.ndarray, tol: float = 1e-12) -> float:
    """Perron root of a nonnegative irreducible matrix by power iteration on A + I."""
    size = adjacency.shape[0]
    shifted = adjacency.astype(float) + np.eye(size)
    vector = np.ones(size) / size
    value = 0.0
    for _ in range(100_000):
        pushed = shifted @ vector
        new_value = float(pushed.sum() / vector.sum())
        pushed /= pushed.sum()
        residual = float(np.abs(pushed - vector).max())
        vector = pushed
        if abs(new_value - value) < tol and residual < tol:
            value = new_value
            break
        value = new_value
    return value - 1


def sft_entropy(subshift: SFT) -> float:
    """log of the spectral radius, maximised over irreducible components."""
    best = 0.0
    for component in strong_components(subshift.adjacency):
        sub = subshift.adjacency[np.ix_(component, component)]
        if not sub.any():
            continue
        best = max(best, math.log(max(spectral_radius(sub), 1.0)))
    return best


def markov_entropy(measure: MarkovMeasure) -> float:
    """-sum_i pi_i sum_j P_ij log P_ij."""
    return math.fsum(
        float(measure.stationary[i]) * phi(p)
        for i, row in enumerate(measure.transition)
        for p in row
        if p > 0
    )


@dataclass(frozen=True)
class PartitionEntropy:
    """H_n = H_mu(alpha_0^(n-1)) with its rate H_n / n and increment H_n - H_(n-1).

    The increments decrease to h_mu(alpha) and equal it once n passes the memory
    of a Markov measure; ``value`` is the last increment.
    """

    joint: dict[int, float]
    rates: dict[int, float]
    increments: dict[int, float]
    value: float
    rate: float


def partition_entropy_under_markov(
    subshift: Subshift,
    partition: PartitionSpec,
    measure: InvariantMeasure,
    n_max: int,
    caps: Caps = DEFAULT_CAPS,
) -> PartitionEntropy:
    """Entropy of a partition under an invariant measure, from exact cylinder masses.

    :raise ArgumentError: if the measure charges an inadmissible block, or n_max < 1
    :raise ArithmeticError: if the rates or increments fail to decrease
    """
    if n_max < 1:
        msg = f"n_max must be positive, not {n_max}"
        raise ArgumentError(msg)
    width = partition.resolution
    cells = partition.cell_of
    blocks: dict[Word, Mass] = measure.block_distribution(width)
    for block in blocks:
        if block not in cells:
            msg = f"{measure.name} charges block {block} outside {subshift.name}"
            raise ArgumentError(msg)
    joint: dict[int, float] = {}
    names: dict[Word, Word] = {b: (cells[b],) for b in blocks}
    for n in range(1, n_max + 1):
        if n > 1:
            grown: dict[Word, Mass] = {}
            grown_names: dict[Word, Word] = {}
            for block in blocks:
                for a in range(measure.alphabet):
                    longer = (*block, a)
                    mass = measure.cylinder_mass(longer)
                    if not mass > 0:
                        continue
                    cell = cells.get(longer[-width:])
                    if cell is None:
                        msg = f"{measure.name} charges a block outside {subshift.name}"
                        raise ArgumentError(msg)
                    grown[longer] = mass
                    grown_names[longer] = (*names[block], cell)
            caps.check("max_states", len(grown), f"blocks of length {n + width - 1}")
            blocks, names = grown, grown_names
        by_name: dict[Word, Mass] = {}
        for block, mass in blocks.items():
            key = names[block]
            by_name[key] = by_name.get(key, measure.zero) + mass
        joint[n] = math.fsum(phi(min(float(m), 1.0)) for m in by_name.values())
    rates = {n: joint[n] / n for n in joint}
    increments = {n: joint[n] - joint.get(n - 1, 0.0) for n in joint}
    for n in range(2, n_max + 1):
        if rates[n] > rates[n - 1] + _TOL or increments[n] > increments[n - 1] + _TOL:
            msg = par(
                f"""partition entropy increased at n={n}: rate {rates[n - 1]} ->
                {rates[n]}, increment {increments[n - 1]} -> {increments[n]}."""
            )
            raise ArithmeticError(msg)
    return PartitionEntropy(joint, rates, increments, increments[n_max], rates[n_max])


@dataclass(frozen=True)
class EntropyAverage:
    """h_mu next to the weighted average of its ergodic components' entropies."""

    entropy: float
    average: float
    weights: tuple[float, ...] = field(default_factory=tuple)
    components: tuple[float, ...] = field(default_factory=tuple)

    @property
    def holds(self) -> bool:
        return abs(self.entropy - self.average) <= _TOL


def entropy_average_identity(measure: MarkovMeasure) -> EntropyAverage:
    """Check h_mu = sum_i w_i h_(mu_i) over the ergodic decomposition."""
    parts = measure.ergodic_decomposition()
    weights = tuple(float(w) for w, _ in parts)
    values = tuple(markov_entropy(m) for _, m in parts)
    average = math.fsum(w * h for w, h in zip(weights, values))
    return EntropyAverage(markov_entropy(measure), average, weights, values)
