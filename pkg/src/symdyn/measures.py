"""Shift-invariant measures with computable cylinder masses.

A MarkovMeasure lives on the s-block graph: its states are words of length s and
it moves from u to v only when u[1:] == v[:-1]. Rational transition matrices give
exact Fraction masses (stationary vectors solved with sympy); float matrices, such
as the Parry measure, give float masses.

:author: Shay Hill
:created: 2024-03-05
"""

from __future__ import annotations

import itertools as it
import logging
import math
from abc import ABC, abstractmethod
from fractions import Fraction
from functools import cached_property
from typing import TYPE_CHECKING, Any, Sequence, Union

import numpy as np
import sympy
from paragraphs import par

from symdyn.errors import ArgumentError
from symdyn.subshifts import SFT, Substitution, strong_components
from symdyn.words import Word, WordLike, as_word, word_str

if TYPE_CHECKING:
    from numpy import typing as npt

    from symdyn.subshifts import Subshift

logger = logging.getLogger(__name__)

Mass = Union[Fraction, float]

_FLOAT_TOLERANCE = 1e-10


def as_mass(value: Mass | int | str) -> Mass:
    """Read '1/3', 0.5, or Fraction(1, 3) as a Fraction or float."""
    if isinstance(value, float):
        return value
    return Fraction(value)


class InvariantMeasure(ABC):
    """A shift-invariant probability measure on sequences over range(alphabet)."""

    alphabet: int
    name: str
    exact: bool

    @abstractmethod
    def cylinder_mass(self, word: WordLike) -> Mass:
        """Mass of [word]_0. The empty word has mass one."""

    @property
    def zero(self) -> Mass:
        return Fraction(0) if self.exact else 0.0

    @property
    def one(self) -> Mass:
        return Fraction(1) if self.exact else 1.0

    def block_distribution(self, n: int) -> dict[Word, Mass]:
        """Masses of the n-blocks with positive mass, in lexicographic order."""
        found: dict[Word, Mass] = {(): self.one}
        for _ in range(n):
            grown: dict[Word, Mass] = {}
            for word in found:
                for a in range(self.alphabet):
                    mass = self.cylinder_mass((*word, a))
                    if mass > 0:
                        grown[(*word, a)] = mass
            found = grown
        return found

    def is_supported_on(self, subshift: Subshift, depth: int = 4) -> bool:
        """True if every block of positive mass up to depth is admissible."""
        return all(
            subshift.is_admissible(w)
            for n in range(1, depth + 1)
            for w in self.block_distribution(n)
        )

    @abstractmethod
    def describe(self) -> dict[str, Any]:
        """Plain-data description for reports."""


def _as_fraction(value: Any) -> Fraction:
    rational = sympy.Rational(value)
    return Fraction(int(rational.p), int(rational.q))


def _closed_classes(rows: Sequence[Sequence[Mass]]) -> list[list[int]]:
    """Strong components of the positive-transition graph with no exits."""
    size = len(rows)
    adjacency = np.array(
        [[1 if rows[i][j] > 0 else 0 for j in range(size)] for i in range(size)],
        dtype=np.int64,
    )
    closed: list[list[int]] = []
    for component in strong_components(adjacency):
        members = set(component)
        leaves = any(
            rows[i][j] > 0 and j not in members for i in component for j in range(size)
        )
        if not leaves:
            closed.append(component)
    return closed


def _class_stationary(
    rows: Sequence[Sequence[Mass]], members: Sequence[int], exact: bool
) -> list[Mass]:
    """Stationary vector of the chain restricted to one closed class."""
    if exact:
        matrix = sympy.Matrix(
            [
                [sympy.Rational(str(rows[i][j])) for j in members] for i in members
            ]
        )
        system = matrix.T - sympy.eye(len(members))
        basis = system.nullspace()
        vector = basis[0]
        total = sum(vector)
        return [_as_fraction(x / total) for x in vector]
    sub = np.array([[float(rows[i][j]) for j in members] for i in members])
    values, vectors = np.linalg.eig(sub.T)
    pick = int(np.argmin(np.abs(values - 1)))
    vector = np.abs(np.real(vectors[:, pick]))
    return [float(x) for x in vector / vector.sum()]


class MarkovMeasure(InvariantMeasure):
    """Stationary Markov chain on the s-block graph.

    ``states[i]`` is an s-word, ``transition[i][j]`` the probability of moving
    from state i to state j, ``stationary[i]`` the mass of [states[i]]_0.
    """

    def __init__(
        self,
        alphabet: int,
        states: Sequence[WordLike],
        transition: Sequence[Sequence[Mass | int | str]],
        stationary: Sequence[Mass | int | str] | None = None,
        name: str = "markov",
        class_weights: Sequence[Mass] | None = None,
    ) -> None:
        """Validate a chain and solve for its stationary vector when not given.

        :param alphabet: number of symbols
        :param states: distinct words of one length s >= 1
        :param transition: row-stochastic matrix on states
        :param stationary: invariant vector; solved per closed class if omitted
        :param name: label for reports
        :param class_weights: weights of the closed classes when solving for the
            stationary vector of a reducible chain, equal by default
        :raise ArgumentError: if a row does not sum to one, a transition joins
            non-overlapping states, or the stationary vector is not invariant
        """
        self.alphabet = alphabet
        self.name = name
        self.states: tuple[Word, ...] = tuple(as_word(s) for s in states)
        self.block = len(self.states[0]) if self.states else 0
        if self.block < 1 or any(len(s) != self.block for s in self.states):
            msg = "states must be nonempty words of one length"
            raise ArgumentError(msg)
        if len(set(self.states)) != len(self.states):
            msg = "states must be distinct"
            raise ArgumentError(msg)
        self.index = {s: i for i, s in enumerate(self.states)}
        rows = [[as_mass(x) for x in row] for row in transition]
        self.exact = all(isinstance(x, Fraction) for row in rows for x in row)
        if not self.exact:
            rows = [[float(x) for x in row] for row in rows]
        self.transition: tuple[tuple[Mass, ...], ...] = tuple(tuple(r) for r in rows)
        self._validate_transition()
        self.successor: list[list[int]] = [[-1] * alphabet for _ in self.states]
        for i, row in enumerate(self.transition):
            for j, p in enumerate(row):
                if p > 0:
                    self.successor[i][self.states[j][-1]] = j
        if stationary is None:
            vector = self._solve_stationary(class_weights)
        else:
            vector = [as_mass(x) for x in stationary]
            if not self.exact:
                vector = [float(x) for x in vector]
        self.stationary: tuple[Mass, ...] = tuple(vector)
        self._validate_stationary()

    def _close(self, value: Mass, target: Mass) -> bool:
        if self.exact:
            return value == target
        return abs(float(value) - float(target)) <= _FLOAT_TOLERANCE * len(self.states)

    def _validate_transition(self) -> None:
        size = len(self.states)
        if len(self.transition) != size or any(len(r) != size for r in self.transition):
            msg = f"transition matrix must be {size} x {size}"
            raise ArgumentError(msg)
        for i, row in enumerate(self.transition):
            if any(p < 0 for p in row):
                msg = f"negative transition probability in row {i}"
                raise ArgumentError(msg)
            if not self._close(sum(row, start=self.zero), self.one):
                msg = f"row {word_str(self.states[i])} sums to {sum(row)}, not 1"
                raise ArgumentError(msg)
            for j, p in enumerate(row):
                if p > 0 and self.states[i][1:] != self.states[j][:-1]:
                    msg = par(
                        f"""transition {word_str(self.states[i])} ->
                        {word_str(self.states[j])} does not overlap."""
                    )
                    raise ArgumentError(msg)

    def _solve_stationary(self, weights: Sequence[Mass] | None) -> list[Mass]:
        classes = _closed_classes(self.transition)
        if weights is None:
            share: Mass = Fraction(1, len(classes)) if self.exact else 1 / len(classes)
            weights = [share] * len(classes)
        if len(weights) != len(classes):
            msg = f"{len(weights)} class weights for {len(classes)} closed classes"
            raise ArgumentError(msg)
        vector: list[Mass] = [self.zero] * len(self.states)
        for weight, members in zip(weights, classes):
            part = _class_stationary(self.transition, members, self.exact)
            for i, value in zip(members, part):
                vector[i] = weight * value
        return vector

    def _validate_stationary(self) -> None:
        if len(self.stationary) != len(self.states):
            msg = "stationary vector has the wrong length"
            raise ArgumentError(msg)
        if any(x < 0 for x in self.stationary):
            msg = "stationary vector has a negative entry"
            raise ArgumentError(msg)
        if not self._close(sum(self.stationary, start=self.zero), self.one):
            msg = "stationary vector does not sum to 1"
            raise ArgumentError(msg)
        pushed = self.push(list(self.stationary))
        for i, (before, after) in enumerate(zip(self.stationary, pushed)):
            if not self._close(before, after):
                msg = par(
                    f"""measure {self.name} is not shift-invariant: state
                    {word_str(self.states[i])} has mass {before} before and
                    {after} after one step."""
                )
                raise ArgumentError(msg)
        shorter: dict[Word, Mass] = {}
        for state, mass in zip(self.states, self.stationary):
            shorter[state[1:]] = shorter.get(state[1:], self.zero) + mass
        for head in shorter:
            left = sum(
                (m for s, m in zip(self.states, self.stationary) if s[:-1] == head),
                start=self.zero,
            )
            if not self._close(left, shorter[head]):
                msg = f"state masses of {self.name} are not consistent on {head}"
                raise ArgumentError(msg)

    def push(self, vector: Sequence[Mass]) -> list[Mass]:
        """One step of the chain: vector P."""
        result: list[Mass] = [self.zero] * len(self.states)
        for i, weight in enumerate(vector):
            if not weight:
                continue
            for j in self.successor[i]:
                if j >= 0:
                    result[j] += weight * self.transition[i][j]
        return result

    def transition_matrix(self) -> npt.NDArray[np.float64]:
        """Float copy of the transition matrix."""
        return np.array([[float(p) for p in row] for row in self.transition])

    def cylinder_mass(self, word: WordLike) -> Mass:
        word = as_word(word)
        s = self.block
        if len(word) < s:
            return sum(
                (m for st, m in zip(self.states, self.stationary)
                 if st[: len(word)] == word),
                start=self.zero,
            )
        state = self.index.get(word[:s])
        if state is None:
            return self.zero
        mass = self.stationary[state]
        for symbol in word[s:]:
            if not mass:
                return self.zero
            if symbol >= self.alphabet:
                return self.zero
            nxt = self.successor[state][symbol]
            if nxt < 0:
                return self.zero
            mass *= self.transition[state][nxt]
            state = nxt
        return mass

    def _pad_left(self, word: Word) -> list[Word]:
        short = self.block - len(word)
        if short <= 0:
            return [word]
        return [(*p, *word) for p in it.product(range(self.alphabet), repeat=short)]

    def _pad_right(self, word: Word) -> list[Word]:
        short = self.block - len(word)
        if short <= 0:
            return [word]
        return [(*word, *p) for p in it.product(range(self.alphabet), repeat=short)]

    def end_vector(self, word: WordLike) -> list[Mass]:
        """Masses of [word]_0 split by the state on word's last s symbols."""
        vector: list[Mass] = [self.zero] * len(self.states)
        for padded in self._pad_left(as_word(word)):
            mass = self.cylinder_mass(padded)
            if mass:
                vector[self.index[padded[-self.block :]]] += mass
        return vector

    def finish(self, vector: Sequence[Mass], word: WordLike) -> Mass:
        """Mass of reading word next, from a vector over the current state.

        vector holds masses of states whose first symbol is the first symbol of
        word's position.
        """
        total = self.zero
        for padded in self._pad_right(as_word(word)):
            state = self.index.get(padded[: self.block])
            if state is None or not vector[state]:
                continue
            mass = vector[state]
            for symbol in padded[self.block :]:
                nxt = self.successor[state][symbol]
                if nxt < 0:
                    mass = self.zero
                    break
                mass *= self.transition[state][nxt]
                state = nxt
            total += mass
        return total

    def joint_mass(self, left: WordLike, right: WordLike, gap: int) -> Mass:
        """Mass of [left]_0 intersect [right]_(len(left) + gap).

        :raise ArgumentError: if gap < 0
        """
        if gap < 0:
            msg = f"gap must be non-negative, not {gap}"
            raise ArgumentError(msg)
        vector = self.end_vector(left)
        for _ in range(gap + self.block):
            vector = self.push(vector)
        return self.finish(vector, right)

    @cached_property
    def closed_classes(self) -> list[list[int]]:
        """Closed classes of the chain carrying positive stationary mass."""
        return [
            c for c in _closed_classes(self.transition)
            if any(self.stationary[i] > 0 for i in c)
        ]

    @property
    def is_ergodic(self) -> bool:
        return len(self.closed_classes) == 1

    @property
    def has_atoms(self) -> bool:
        """True if some ergodic component is a single periodic orbit."""
        return any(
            all(sum(1 for p in self.transition[i] if p > 0) == 1 for i in c)
            for c in self.closed_classes
        )

    def ergodic_decomposition(self) -> list[tuple[Mass, MarkovMeasure]]:
        """Weights and ergodic components, one per closed class."""
        parts: list[tuple[Mass, MarkovMeasure]] = []
        for k, members in enumerate(self.closed_classes):
            weight = sum((self.stationary[i] for i in members), start=self.zero)
            states = [self.states[i] for i in members]
            rows = [[self.transition[i][j] for j in members] for i in members]
            vector = [self.stationary[i] / weight for i in members]
            component = MarkovMeasure(
                self.alphabet, states, rows, vector, name=f"{self.name}[{k}]"
            )
            parts.append((weight, component))
        return parts

    def describe(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "block": self.block,
            "states": [word_str(s) for s in self.states],
            "exact": self.exact,
            "stationary": [str(x) for x in self.stationary],
        }


def bernoulli(
    probabilities: Sequence[Mass | int | str], name: str = ""
) -> MarkovMeasure:
    """Independent symbols with the given probabilities."""
    probs = [as_mass(p) for p in probabilities]
    size = len(probs)
    states = [(a,) for a in range(size)]
    rows = [list(probs) for _ in range(size)]
    label = name or "bernoulli(" + ",".join(str(p) for p in probs) + ")"
    return MarkovMeasure(size, states, rows, list(probs), name=label)


def markov_chain(
    matrix: Sequence[Sequence[Mass | int | str]], name: str = "markov"
) -> MarkovMeasure:
    """First-order chain on symbols from a row-stochastic matrix."""
    size = len(matrix)
    return MarkovMeasure(size, [(a,) for a in range(size)], matrix, name=name)


def _sft_rows(subshift: SFT) -> list[list[int]]:
    return [np.flatnonzero(r).tolist() for r in subshift.adjacency]


def uniform_markov(subshift: SFT, name: str = "") -> MarkovMeasure:
    """Equal split over successors on the vertex graph of an SFT, exact."""
    size = len(subshift.states)
    rows: list[list[Mass]] = [[Fraction(0)] * size for _ in range(size)]
    for i, succ in enumerate(_sft_rows(subshift)):
        for j in succ:
            rows[i][j] = Fraction(1, len(succ))
    name = name or f"uniform({subshift.name})"
    return MarkovMeasure(subshift.alphabet, subshift.states, rows, name=name)


def random_markov(
    subshift: SFT, seed: int, denominator: int = 8, name: str = ""
) -> MarkovMeasure:
    """Rational chain with positive random weights on every edge of an SFT.

    :param seed: numpy rng seed
    :param denominator: weights are drawn from 1..denominator per edge
    """
    rng = np.random.default_rng(seed)
    size = len(subshift.states)
    rows: list[list[Mass]] = [[Fraction(0)] * size for _ in range(size)]
    for i, succ in enumerate(_sft_rows(subshift)):
        weights = [int(w) for w in rng.integers(1, denominator + 1, size=len(succ))]
        total = sum(weights)
        for j, w in zip(succ, weights):
            rows[i][j] = Fraction(w, total)
    return MarkovMeasure(
        subshift.alphabet,
        subshift.states,
        rows,
        name=name or f"random({subshift.name}, seed={seed})",
    )


def parry_measure(subshift: SFT) -> MarkovMeasure:
    """The measure of maximal entropy of an SFT, in floats.

    P_ij = A_ij v_j / (lambda v_i), pi_i proportional to u_i v_i, with u, v the
    left and right Perron vectors of the component of largest spectral radius.
    """
    adjacency = subshift.adjacency.astype(float)
    best: tuple[float, list[int]] = (-1.0, [])
    for component in strong_components(subshift.adjacency):
        sub = adjacency[np.ix_(component, component)]
        radius = float(np.max(np.abs(np.linalg.eigvals(sub))))
        if radius > best[0] + _FLOAT_TOLERANCE:
            best = (radius, component)
    radius, members = best
    sub = adjacency[np.ix_(members, members)]
    values, right = np.linalg.eig(sub)
    pick = int(np.argmax(np.real(values)))
    v = np.abs(np.real(right[:, pick]))
    values, left = np.linalg.eig(sub.T)
    pick = int(np.argmax(np.real(values)))
    u = np.abs(np.real(left[:, pick]))
    size = len(subshift.states)
    rows = [[0.0] * size for _ in range(size)]
    stationary = [0.0] * size
    weights = u * v
    weights = weights / weights.sum()
    for a, i in enumerate(members):
        stationary[i] = float(weights[a])
        for b, j in enumerate(members):
            if sub[a, b]:
                rows[i][j] = float(v[b] / (radius * v[a]))
    for i in range(size):
        if i not in members:
            succ = _sft_rows(subshift)[i]
            for j in succ:
                rows[i][j] = 1 / len(succ)
    logger.debug("parry measure of %s: spectral radius %.12f", subshift.name, radius)
    return MarkovMeasure(
        subshift.alphabet,
        subshift.states,
        rows,
        stationary,
        name=f"parry({subshift.name})",
    )


def markov_family(subshift: SFT, count: int, seed: int = 0) -> list[MarkovMeasure]:
    """Parry, the uniform split, and count - 2 random rational chains."""
    family: list[MarkovMeasure] = [parry_measure(subshift), uniform_markov(subshift)]
    family.extend(random_markov(subshift, seed + k) for k in range(max(count - 2, 0)))
    return family[: max(count, 1)]


class PeriodicMeasure(InvariantMeasure):
    """Uniform measure on the orbit of a periodic point."""

    def __init__(self, cycle: WordLike, alphabet: int, name: str = "") -> None:
        self.cycle = as_word(cycle)
        if not self.cycle:
            msg = "periodic measure needs a nonempty cycle"
            raise ArgumentError(msg)
        self.alphabet = alphabet
        self.exact = True
        self.name = name or f"periodic({word_str(self.cycle)})"

    def cylinder_mass(self, word: WordLike) -> Mass:
        word = as_word(word)
        period = len(self.cycle)
        extended = self.cycle * (len(word) // period + 2)
        hits = sum(1 for i in range(period) if extended[i : i + len(word)] == word)
        return Fraction(hits, period)

    def describe(self) -> dict[str, Any]:
        return {"name": self.name, "cycle": word_str(self.cycle)}


class FrequencyMeasure(InvariantMeasure):
    """Unique invariant measure of a primitive substitution shift.

    n-block frequencies are the normalized Perron eigenvector of the induced
    substitution on n-blocks.
    """

    def __init__(self, substitution: Substitution) -> None:
        self.substitution = substitution
        self.alphabet = substitution.alphabet
        self.exact = False
        self.name = f"frequencies({substitution.name})"
        self._tables: dict[int, dict[Word, float]] = {}

    def frequencies(self, n: int) -> dict[Word, float]:
        """Frequency of every admissible n-block."""
        if n not in self._tables:
            self._tables[n] = self._solve(n)
        return self._tables[n]

    def _solve(self, n: int) -> dict[Word, float]:
        blocks = self.substitution.language(n)
        index = {b: i for i, b in enumerate(blocks)}
        matrix = np.zeros((len(blocks), len(blocks)))
        for b in blocks:
            image = self.substitution.apply(b)
            for start in range(len(self.substitution.rules[b[0]])):
                matrix[index[b], index[image[start : start + n]]] += 1
        values, vectors = np.linalg.eig(matrix.T)
        pick = int(np.argmax(np.real(values)))
        vector = np.abs(np.real(vectors[:, pick]))
        vector = vector / vector.sum()
        return {b: float(vector[i]) for b, i in index.items()}

    def cylinder_mass(self, word: WordLike) -> Mass:
        word = as_word(word)
        if not word:
            return 1.0
        return self.frequencies(len(word)).get(word, 0.0)

    def describe(self) -> dict[str, Any]:
        return {"name": self.name, "rules": self.substitution.rule_text()}


def entropy_of_vector(probabilities: Sequence[Mass]) -> float:
    """Shannon entropy in nats."""
    return -sum(float(p) * math.log(float(p)) for p in probabilities if p > 0)
