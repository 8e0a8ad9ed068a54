"""Return-time sets N(U,V), transitivity and mixing of SFTs, correlations.

N(U,V) = {n : T^n U meets V} is computed exactly on a window by path queries on
the SFT graph (or block enumeration for other systems). Classification reads the
graph; the brute-force flags read the windows and serve as its oracle. Correlations
of cylinder indicators under Markov measures are exact transfer-matrix masses.

:author: Shay Hill
:created: 2024-03-25
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any

import numpy as np
from paragraphs import par

from symdyn.caps import DEFAULT_CAPS, Caps
from symdyn.cylinders import CoverSpec, CylinderUnion
from symdyn.entropy import cover_entropy
from symdyn.errors import ArgumentError
from symdyn.families import IntegerWindowSet, SequenceSpec
from symdyn.subshifts import SFT, graph_period, strong_components
from symdyn.words import Word, word_str

if TYPE_CHECKING:
    from symdyn.measures import MarkovMeasure, Mass
    from symdyn.subshifts import Subshift

logger = logging.getLogger(__name__)


def _placed(subshift: Subshift, cylinders: CylinderUnion) -> tuple[int, list[Word]]:
    """Window start and admissible words; all of X is the 1-blocks at 0.

    :raise ArgumentError: if the union is empty in subshift
    """
    if cylinders.is_everything:
        return 0, list(subshift.language(1))
    words = cylinders.admissible_words(subshift)
    if not words:
        msg = f"{cylinders.text()} is empty in {subshift.name}"
        raise ArgumentError(msg)
    return cylinders.lo, words


def _merge(left: Word, right: Word, offset: int) -> Word | None:
    """left at 0 and right at offset, if they agree where they overlap."""
    overlap = left[offset : offset + len(right)]
    if right[: len(overlap)] != overlap:
        return None
    return left + right[len(overlap) :]


def _meet(
    subshift: Subshift,
    left: tuple[int, list[Word]],
    right: tuple[int, list[Word]],
) -> bool:
    """True if some point shows a left word at its start and a right word at its."""
    if left[0] > right[0]:
        left, right = right, left
    (left_lo, left_words), (right_lo, right_words) = left, right
    offset = right_lo - left_lo
    width = len(left_words[0])
    if offset < width:
        return any(
            merged is not None and subshift.is_admissible(merged)
            for u in left_words
            for v in right_words
            for merged in [_merge(u, v, offset)]
        )
    gap = offset - width
    if isinstance(subshift, SFT):
        tails = sorted({s for u in left_words for s in subshift.last_states(u)})
        heads = sorted({s for v in right_words for s in subshift.first_states(v)})
        if not tails or not heads:
            return False
        reach = subshift.reach(gap + subshift.block_length)
        return bool(reach[np.ix_(tails, heads)].any())
    return any(subshift.can_join(u, v, gap) for u in left_words for v in right_words)


def n_set(
    subshift: Subshift,
    u_set: CylinderUnion,
    v_set: CylinderUnion,
    horizon: int,
    caps: Caps = DEFAULT_CAPS,
) -> IntegerWindowSet:
    """N(U,V) = {n : T^n U meets V}, exactly, for |n| <= H.

    :raise ArgumentError: if U or V is empty in subshift
    :raise ResourceCapError: if the window passes max_states
    """
    caps.check("max_states", 2 * horizon + 1, "N(U,V) window")
    u_lo, u_words = _placed(subshift, u_set)
    v_lo, v_words = _placed(subshift, v_set)
    members = [
        n
        for n in range(-horizon, horizon + 1)
        if _meet(subshift, (u_lo, u_words), (v_lo + n, v_words))
    ]
    found = IntegerWindowSet.from_members(members, -horizon, horizon, "N(U,V)")
    found.notes["U"] = u_set.text()
    found.notes["V"] = v_set.text()
    return found


def state_cylinders(subshift: SFT) -> list[CylinderUnion]:
    """Cylinders of the graph vertices at 0, which generate."""
    return [CylinderUnion.cylinder(subshift.alphabet, s) for s in subshift.states]


@dataclass(frozen=True)
class BruteForceFlags:
    """Transitivity and mixing read from N(U,V) windows of state cylinders."""

    transitive: bool
    mixing: bool
    horizon: int
    entry: dict[str, int | None]

    def describe(self) -> dict[str, Any]:
        return {
            "transitive": self.transitive,
            "mixing": self.mixing,
            "horizon": self.horizon,
            "entry": self.entry,
        }


def _entry_time(members: IntegerWindowSet, horizon: int) -> int | None:
    """Least n0 with [n0, H] inside the set, or None."""
    n0 = horizon + 1
    while n0 > 0 and n0 - 1 in members:
        n0 -= 1
    return n0 if n0 <= horizon else None


def brute_force_flags(subshift: SFT, horizon: int = 64) -> BruteForceFlags:
    """Window oracle: transitive if every N(U,V) meets [1, H], mixing if every
    N(U,V) contains [n0, H] for some n0 <= H/2.
    """
    cylinders = state_cylinders(subshift)
    transitive = mixing = True
    entry: dict[str, int | None] = {}
    for u_set in cylinders:
        for v_set in cylinders:
            members = n_set(subshift, u_set, v_set, horizon)
            if not any(n in members for n in range(1, horizon + 1)):
                transitive = False
            n0 = _entry_time(members, horizon)
            entry[f"{u_set.text()} -> {v_set.text()}"] = n0
            if n0 is None or n0 > horizon // 2:
                mixing = False
    return BruteForceFlags(transitive, mixing, horizon, entry)


@dataclass(frozen=True)
class SFTClassification:
    """Graph facts about an SFT with window evidence beside them.

    ``te_gaps`` holds the largest gap of N(U,U) in [1, H] for each state cylinder
    U; ``thick_runs`` the longest run of N(U,V) in [0, H] for each pair.
    """

    transitive: bool
    period: int
    mixing: bool
    weak_mixing: bool
    components: int
    product_irreducible: bool
    horizon: int
    te_gaps: dict[str, int | None]
    thick_runs: dict[str, int]

    def describe(self) -> dict[str, Any]:
        return {
            "transitive": self.transitive,
            "period": self.period,
            "mixing": self.mixing,
            "weak_mixing": self.weak_mixing,
            "components": self.components,
            "product_irreducible": self.product_irreducible,
            "horizon": self.horizon,
            "te_gaps": self.te_gaps,
            "thick_runs": self.thick_runs,
        }


def _is_irreducible(adjacency: np.ndarray) -> bool:
    components = strong_components(adjacency)
    return len(components) == 1 and bool(adjacency.any())


def classify_sft(
    subshift: SFT, horizon: int = 64, caps: Caps = DEFAULT_CAPS
) -> SFTClassification:
    """Transitivity, period, mixing and weak mixing from the vertex graph.

    Weak mixing is certified by irreducibility of the product graph. The N(U,V)
    windows of state cylinders are reported as thickness and syndeticity
    evidence.

    :param horizon: window for the evidence
    :raise ResourceCapError: if the product graph passes max_states
    """
    adjacency = subshift.adjacency
    size = adjacency.shape[0]
    caps.check("max_states", size * size, "product graph")
    components = [
        c
        for c in strong_components(adjacency)
        if len(c) > 1 or adjacency[c[0], c[0]]
    ]
    transitive = _is_irreducible(adjacency)
    period = 0
    for component in components:
        period = math.gcd(period, graph_period(adjacency, component))
    mixing = transitive and period == 1
    product = np.kron(adjacency, adjacency)
    product_irreducible = _is_irreducible(product)
    te_gaps: dict[str, int | None] = {}
    thick_runs: dict[str, int] = {}
    cylinders = state_cylinders(subshift)
    for u_set in cylinders:
        for v_set in cylinders:
            members = n_set(subshift, u_set, v_set, horizon, caps).restricted(
                0, horizon
            )
            run, best = 0, 0
            for n in range(horizon + 1):
                run = run + 1 if n in members else 0
                best = max(best, run)
            thick_runs[f"{u_set.text()} -> {v_set.text()}"] = best
            if u_set == v_set:
                found = [n for n in members if n > 0]
                gaps = [b - a for a, b in zip(found, found[1:])]
                te_gaps[u_set.text()] = max(gaps, default=None)
    logger.debug(
        "classified %s: period %d over %d components",
        subshift.name,
        period,
        len(components),
    )
    return SFTClassification(
        transitive,
        period,
        mixing,
        transitive and product_irreducible,
        len(components),
        product_irreducible,
        horizon,
        te_gaps,
        thick_runs,
    )


@dataclass(frozen=True)
class TranslationCheck:
    """k + N(U0,U0) inside N(U,V) for each k checked, U0 = U meet T^-k V."""

    checked: tuple[int, ...]
    violations: tuple[tuple[int, int], ...]
    horizon: int

    @property
    def holds(self) -> bool:
        return not self.violations


def translation_law(
    subshift: Subshift,
    u_set: CylinderUnion,
    v_set: CylinderUnion,
    horizon: int,
    shift_cap: int = 4,
    caps: Caps = DEFAULT_CAPS,
) -> TranslationCheck:
    """Check k + N(U0,U0) inside N(U,V) on the window, for k in N(U,V), |k| <= cap.

    :param horizon: window of N(U,V)
    :param shift_cap: largest |k| tried
    """
    outer = n_set(subshift, u_set, v_set, horizon, caps)
    checked: list[int] = []
    violations: list[tuple[int, int]] = []
    for k in outer:
        if abs(k) > shift_cap:
            continue
        start = u_set & v_set.preimage(k)
        inner = n_set(subshift, start, start, horizon - abs(k), caps)
        checked.append(k)
        violations.extend((k, m) for m in inner if k + m not in outer)
    return TranslationCheck(tuple(checked), tuple(violations), horizon)


def correlation_mass(
    measure: MarkovMeasure, a_set: CylinderUnion, b_set: CylinderUnion, k: int
) -> Mass:
    """mu(A meet T^-k B), exact for rational chains."""
    if a_set.is_nothing or b_set.is_nothing:
        return measure.zero
    if a_set.is_everything:
        return b_set.mass(measure)
    if b_set.is_everything:
        return a_set.mass(measure)
    left = (a_set.lo, sorted(a_set.words))
    right = (b_set.lo + k, sorted(b_set.words))
    if left[0] > right[0]:
        left, right = right, left
    offset = right[0] - left[0]
    width = len(left[1][0])
    total = measure.zero
    for u in left[1]:
        for v in right[1]:
            if offset >= width:
                total += measure.joint_mass(u, v, offset - width)
            else:
                merged = _merge(u, v, offset)
                if merged is not None:
                    total += measure.cylinder_mass(merged)
    return total


def _chain_is_mixing(measure: MarkovMeasure) -> bool:
    if not measure.is_ergodic:
        return False
    members = measure.closed_classes[0]
    support = np.array(
        [[1 if measure.transition[i][j] > 0 else 0 for j in members] for i in members],
        dtype=np.int64,
    )
    return graph_period(support, list(range(len(members)))) == 1


@dataclass(frozen=True)
class PoincareMasses:
    """mu(B meet T^-s_j B) along a sequence, with running averages."""

    base: Mass
    terms: tuple[int, ...]
    masses: tuple[Mass, ...]
    averages: tuple[float, ...]
    exact: bool

    @property
    def positive(self) -> bool:
        return any(m > 0 for m in self.masses)

    def describe(self) -> dict[str, Any]:
        return {
            "base": str(self.base),
            "terms": list(self.terms),
            "masses": [str(m) for m in self.masses],
            "averages": list(self.averages),
            "positive": self.positive,
            "exact": self.exact,
        }


def poincare_return_masses(
    measure: MarkovMeasure,
    base: CylinderUnion,
    sequence: SequenceSpec,
    j_max: int,
) -> PoincareMasses:
    """Masses of B meet T^-s_j B for j <= j_max.

    :raise ArgumentError: if mu(B) = 0
    :raise ArithmeticError: if every mass is 0 for a mixing chain
    """
    mass = base.mass(measure)
    if not mass:
        msg = f"{base.text()} has measure 0 under {measure.name}"
        raise ArgumentError(msg)
    terms = tuple(sequence.terms(j_max))
    masses = tuple(correlation_mass(measure, base, base, s) for s in terms)
    running = 0.0
    averages: list[float] = []
    for j, value in enumerate(masses, start=1):
        running += float(value)
        averages.append(running / j)
    found = PoincareMasses(mass, terms, masses, tuple(averages), measure.exact)
    if not found.positive and _chain_is_mixing(measure):
        msg = par(
            f"""no return of {base.text()} along {sequence.kind} within {j_max} terms
            under the mixing chain {measure.name}"""
        )
        raise ArithmeticError(msg)
    return found


@dataclass(frozen=True)
class MatrixCoefficient:
    """phi_f(n) = <U^n f, f> for f the centered, normalized indicator.

    ``limsup`` is the largest value over the second half of the window;
    ``rigid`` flags values within tol of 1 there.
    """

    mean: Mass
    values: tuple[Mass, ...]
    limsup: float
    rigid: bool

    def describe(self) -> dict[str, Any]:
        return {
            "mean": str(self.mean),
            "values": [str(v) for v in self.values],
            "limsup": self.limsup,
            "rigid": self.rigid,
        }


def matrix_coefficient(
    measure: MarkovMeasure,
    indicator: CylinderUnion,
    n_max: int,
    tol: float = 1e-9,
) -> MatrixCoefficient:
    """phi_f(n) for 0 <= n <= n_max.

    phi_f(n) = (mu(F meet T^-n F) - mu(F)^2) / (mu(F)(1 - mu(F))).

    :raise ArgumentError: if mu(F) is 0 or 1
    """
    mean = indicator.mass(measure)
    if not 0 < mean < 1:
        msg = f"indicator of {indicator.text()} has mean {mean}; need 0 < mean < 1"
        raise ArgumentError(msg)
    variance = mean * (1 - mean)
    values = tuple(
        (correlation_mass(measure, indicator, indicator, n) - mean * mean) / variance
        for n in range(n_max + 1)
    )
    tail = [float(v) for v in values[max(1, (n_max + 1) // 2) :]] or [float(values[-1])]
    limsup = max(tail)
    return MatrixCoefficient(mean, values, limsup, limsup >= 1 - tol)


@dataclass(frozen=True)
class CesaroReport:
    """(1/n) sum_(j<n) |mu(A meet T^-j B) - mu(A) mu(B)| for n = 1 .. n_max."""

    averages: tuple[float, ...]

    @property
    def final(self) -> float:
        return self.averages[-1]


def cesaro_mixing(
    measure: MarkovMeasure, a_set: CylinderUnion, b_set: CylinderUnion, n_max: int
) -> CesaroReport:
    """Cesaro averages of correlation defects."""
    if n_max < 1:
        msg = f"n_max must be positive, not {n_max}"
        raise ArgumentError(msg)
    product = float(a_set.mass(measure)) * float(b_set.mass(measure))
    total = 0.0
    averages: list[float] = []
    for j in range(n_max):
        total += abs(float(correlation_mass(measure, a_set, b_set, j)) - product)
        averages.append(total / (j + 1))
    return CesaroReport(tuple(averages))


@dataclass(frozen=True)
class UpeWitness:
    """Least cover entropy over covers {X minus [a], X minus [b]} at resolution L."""

    resolution: int
    min_entropy: float
    witness: tuple[str, str]
    entropies: dict[str, float]

    def describe(self) -> dict[str, Any]:
        return {
            "resolution": self.resolution,
            "min_entropy": self.min_entropy,
            "witness": list(self.witness),
            "entropies": self.entropies,
        }


def upe_witness(
    subshift: Subshift,
    resolution: int,
    n_max: int = 6,
    caps: Caps = DEFAULT_CAPS,
) -> UpeWitness:
    """Two-set covers by complements of L-cylinders, and their least entropy.

    Entropy here is the growth rate of subcover counts, so bounded counts read
    as 0. A positive minimum is evidence of uniform positive entropy at this
    resolution only.

    :raise ArgumentError: if an SFT is not transitive or has one L-block
    """
    if isinstance(subshift, SFT) and not _is_irreducible(subshift.adjacency):
        msg = f"{subshift.name} is not transitive"
        raise ArgumentError(msg)
    blocks = subshift.language(resolution)
    if len(blocks) < 2:
        msg = f"{subshift.name} has one {resolution}-block; no two-set cover"
        raise ArgumentError(msg)
    alphabet = subshift.alphabet
    entropies: dict[str, float] = {}
    best: tuple[float, tuple[str, str]] = (math.inf, ("", ""))
    for i, a in enumerate(blocks):
        for b in blocks[i + 1 :]:
            u_set = ~CylinderUnion.cylinder(alphabet, a)
            v_set = ~CylinderUnion.cylinder(alphabet, b)
            labels = (f"X-[{word_str(a)}]", f"X-[{word_str(b)}]")
            cover = CoverSpec(subshift, [u_set, v_set], list(labels))
            value = cover_entropy(subshift, cover, n_max, caps).growth
            entropies[" , ".join(labels)] = value
            if value < best[0]:
                best = (value, labels)
    return UpeWitness(resolution, best[0], best[1], entropies)
