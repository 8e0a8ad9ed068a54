"""Finite presentations of subshifts.

Four kinds of system: the full shift, shifts of finite type given by forbidden
words, primitive substitution shifts, and Sturmian codings of a rational rotation.

An SFT is compiled once, at construction, to a vertex shift on its admissible
m-blocks (m = longest forbidden word minus one, at least one). Vertices with no
bi-infinite path through them are trimmed, so the language is factorial and
extendable and every vertex is the m-block of some point.

Points are two-sided. A point is handed around as a finite word together with the
index of its origin; windows are anchored at the origin.

:author: Shay Hill
:created: 2024-03-02
"""

from __future__ import annotations

import itertools as it
import logging
import math
from abc import ABC, abstractmethod
from fractions import Fraction
from functools import cached_property
from typing import TYPE_CHECKING, Any, Iterable, Sequence, Union

import numpy as np
from paragraphs import par
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from symdyn.caps import DEFAULT_CAPS, Caps
from symdyn.errors import ArgumentError, InvalidSubshiftError, ResourceCapError
from symdyn.words import PatternAutomaton, Word, WordLike, as_word, check_alphabet

if TYPE_CHECKING:
    from numpy import typing as npt

logger = logging.getLogger(__name__)

Seed = Union[WordLike, int, None]


def strong_components(adjacency: npt.NDArray[np.int64]) -> list[list[int]]:
    """Strongly connected components of a directed graph.

    :param adjacency: square matrix, nonzero entries are edges
    :return: components as sorted vertex lists, ordered by smallest vertex
    """
    if adjacency.shape[0] == 0:
        return []
    _, labels = connected_components(
        csr_matrix(adjacency != 0), directed=True, connection="strong"
    )
    groups: dict[int, list[int]] = {}
    for vertex, label in enumerate(labels.tolist()):
        groups.setdefault(int(label), []).append(vertex)
    return sorted(groups.values(), key=lambda g: g[0])


def graph_period(adjacency: npt.NDArray[np.int64], component: Sequence[int]) -> int:
    """Period of a strongly connected component.

    gcd over edges (u, v) inside the component of level(u) + 1 - level(v), with
    levels from a breadth-first search. A component without internal edges has
    period 0.
    """
    members = set(component)
    root = component[0]
    level = {root: 0}
    frontier = [root]
    while frontier:
        nxt: list[int] = []
        for u in frontier:
            for v in np.flatnonzero(adjacency[u]).tolist():
                if v in members and v not in level:
                    level[v] = level[u] + 1
                    nxt.append(v)
        frontier = nxt
    period = 0
    for u in component:
        for v in np.flatnonzero(adjacency[u]).tolist():
            if v in members:
                period = math.gcd(period, level[u] + 1 - level[v])
    return abs(period)


def boolean_power(adjacency: npt.NDArray[np.int64], k: int) -> npt.NDArray[np.bool_]:
    """Reachability in exactly k steps."""
    size = adjacency.shape[0]
    result = np.eye(size, dtype=np.int64)
    base = (adjacency != 0).astype(np.int64)
    while k:
        if k & 1:
            result = np.minimum(result @ base, 1)
        base = np.minimum(base @ base, 1)
        k >>= 1
    return result.astype(bool)


class Subshift(ABC):
    """A shift-invariant set of two-sided sequences over range(alphabet)."""

    alphabet: int
    name: str

    def __init__(self, alphabet: int, name: str, caps: Caps = DEFAULT_CAPS) -> None:
        if alphabet < 2:
            msg = f"alphabet must have at least 2 symbols, not {alphabet}"
            raise InvalidSubshiftError(msg)
        self.alphabet = alphabet
        self.name = name
        self.caps = caps
        self._languages: dict[int, tuple[Word, ...]] = {}
        self._language_sets: dict[int, frozenset[Word]] = {}

    @abstractmethod
    def _build_language(self, n: int) -> list[Word]:
        """Admissible n-blocks, n >= 1, in any order."""

    @abstractmethod
    def orbit_segment(self, seed: Seed, length: int) -> Word:
        """First length symbols of the forward orbit of a point chosen by seed."""

    @abstractmethod
    def describe(self) -> dict[str, Any]:
        """Plain-data description for reports."""

    @property
    @abstractmethod
    def is_finite(self) -> bool:
        """True if the subshift is a finite union of periodic orbits."""

    def language(self, n: int) -> tuple[Word, ...]:
        """Admissible n-blocks, sorted lexicographically, no duplicates.

        :param n: block length, n >= 0 (the empty word is the only 0-block)
        :return: sorted tuple of words
        :raise ArgumentError: if n < 0
        :raise ResourceCapError: if the block count exceeds caps.max_states
        """
        if n < 0:
            msg = f"block length must be non-negative, not {n}"
            raise ArgumentError(msg)
        if n not in self._languages:
            if n == 0:
                self._languages[n] = ((),)
            else:
                self._languages[n] = tuple(sorted(set(self._build_language(n))))
        return self._languages[n]

    def is_admissible(self, word: WordLike) -> bool:
        """True if word occurs in some point of the subshift."""
        word = as_word(word)
        if any(x >= self.alphabet for x in word):
            return False
        n = len(word)
        if n not in self._language_sets:
            self._language_sets[n] = frozenset(self.language(n))
        return word in self._language_sets[n]

    def can_join(self, left: WordLike, right: WordLike, gap: int) -> bool:
        """True if some point shows left at 0 and right at len(left) + gap.

        :param left: word placed at the origin
        :param right: word placed after a gap of free symbols
        :param gap: number of free symbols between, gap >= 0
        """
        left, right = as_word(left), as_word(right)
        if gap < 0:
            msg = f"gap must be non-negative, not {gap}"
            raise ArgumentError(msg)
        width = len(left) + gap + len(right)
        return any(
            w[: len(left)] == left and w[len(left) + gap :] == right
            for w in self.language(width)
        )


class SFT(Subshift):
    """Shift of finite type given by forbidden words."""

    def __init__(
        self,
        alphabet: int,
        forbidden: Iterable[WordLike] = (),
        caps: Caps = DEFAULT_CAPS,
        name: str | None = None,
    ) -> None:
        """Compile the forbidden list to a trimmed vertex shift.

        :param alphabet: number of symbols
        :param forbidden: words that may not occur
        :param caps: enumeration caps
        :param name: label for reports
        :raise InvalidSubshiftError: if a forbidden word is empty or the system
            has no points
        :raise ResourceCapError: if alphabet**m exceeds caps.max_states
        """
        words = sorted({as_word(w) for w in forbidden})
        super().__init__(alphabet, name or f"SFT({alphabet})", caps)
        if any(not w for w in words):
            msg = "forbidden words must be nonempty"
            raise InvalidSubshiftError(msg)
        for word in words:
            check_alphabet(word, alphabet)
        self.forbidden: tuple[Word, ...] = tuple(words)
        self.block_length = max([1] + [len(w) - 1 for w in words])
        self._compile()

    def _avoids(self, automaton: PatternAutomaton | None, word: Word) -> bool:
        if automaton is None:
            return True
        state = 0
        for symbol in word:
            state = automaton.delta[state][symbol]
            if automaton.hits[state]:
                return False
        return True

    def _compile(self) -> None:
        m = self.block_length
        self.caps.check("max_states", self.alphabet**m, f"{m}-block vertex set")
        automaton = None
        if self.forbidden:
            automaton = PatternAutomaton(self.forbidden, self.alphabet)
        vertices = [
            w
            for w in it.product(range(self.alphabet), repeat=m)
            if self._avoids(automaton, w)
        ]
        index = {v: i for i, v in enumerate(vertices)}
        adjacency = np.zeros((len(vertices), len(vertices)), dtype=np.int64)
        for i, vertex in enumerate(vertices):
            for a in range(self.alphabet):
                if not self._avoids(automaton, (*vertex, a)):
                    continue
                j = index.get((*vertex[1:], a))
                if j is not None:
                    adjacency[i, j] = 1

        keep = np.ones(len(vertices), dtype=bool)
        while True:
            live = adjacency[np.ix_(keep, keep)]
            essential = (live.sum(axis=0) > 0) & (live.sum(axis=1) > 0)
            if essential.all():
                break
            keep[np.flatnonzero(keep)[~essential]] = False
        if not keep.any():
            msg = f"{self.name} with forbidden words {self.forbidden} has no points"
            raise InvalidSubshiftError(msg)
        logger.debug(
            "compiled %s: %d of %d %d-blocks essential",
            self.name,
            int(keep.sum()),
            len(vertices),
            m,
        )
        self.states: tuple[Word, ...] = tuple(
            v for v, k in zip(vertices, keep.tolist()) if k
        )
        self.state_index = {v: i for i, v in enumerate(self.states)}
        self.adjacency: npt.NDArray[np.int64] = adjacency[np.ix_(keep, keep)]
        self.successor: list[list[int]] = [[-1] * self.alphabet for _ in self.states]
        for i, vertex in enumerate(self.states):
            for j in np.flatnonzero(self.adjacency[i]).tolist():
                self.successor[i][self.states[j][-1]] = j
        self._reach: dict[int, npt.NDArray[np.bool_]] = {}

    @property
    def is_finite(self) -> bool:
        """True if every vertex has exactly one successor."""
        return bool((self.adjacency.sum(axis=1) == 1).all())

    def count_words(self, n: int) -> int:
        """|language(n)| from powers of the adjacency matrix, exact.

        Sum of the entries of A^(n-m) for n >= m.
        """
        m = self.block_length
        if n < m:
            return len({s[:n] for s in self.states})
        vector = [1] * len(self.states)
        rows = [np.flatnonzero(r).tolist() for r in self.adjacency]
        for _ in range(n - m):
            vector = [sum(vector[j] for j in row) for row in rows]
        return sum(vector)

    def _build_language(self, n: int) -> list[Word]:
        m = self.block_length
        if n <= m:
            return [s[:n] for s in self.states]
        self.caps.check("max_states", self.count_words(n), f"language of length {n}")
        frontier = [(s, i) for i, s in enumerate(self.states)]
        for _ in range(n - m):
            frontier = [
                ((*word, a), j)
                for word, i in frontier
                for a, j in enumerate(self.successor[i])
                if j >= 0
            ]
        return [w for w, _ in frontier]

    def path(self, word: WordLike) -> list[int] | None:
        """Vertex sequence read by word, or None if word is inadmissible.

        Words shorter than the block length have no unique path and return [].
        """
        word = as_word(word)
        m = self.block_length
        if any(x >= self.alphabet for x in word):
            return None
        if len(word) < m:
            return [] if self.first_states(word) else None
        state = self.state_index.get(word[:m])
        if state is None:
            return None
        states = [state]
        for symbol in word[m:]:
            state = self.successor[state][symbol]
            if state < 0:
                return None
            states.append(state)
        return states

    def is_admissible(self, word: WordLike) -> bool:
        """True if word labels a path in the vertex shift."""
        return self.path(word) is not None

    def first_states(self, word: WordLike) -> list[int]:
        """Vertices at time 0 of points showing word at 0."""
        word = as_word(word)
        m = self.block_length
        if len(word) >= m:
            found = self.path(word)
            return [found[0]] if found else []
        return [i for i, s in enumerate(self.states) if s[: len(word)] == word]

    def last_states(self, word: WordLike) -> list[int]:
        """Vertices at time len(word) - m of points showing word at 0."""
        word = as_word(word)
        m = self.block_length
        if len(word) >= m:
            found = self.path(word)
            return [found[-1]] if found else []
        return [i for i, s in enumerate(self.states) if s[m - len(word) :] == word]

    def reach(self, k: int) -> npt.NDArray[np.bool_]:
        """Boolean matrix of vertex pairs joined by a path of exactly k edges."""
        if k not in self._reach:
            self._reach[k] = boolean_power(self.adjacency, k)
        return self._reach[k]

    def can_join(self, left: WordLike, right: WordLike, gap: int) -> bool:
        """True if some point shows left at 0 and right at len(left) + gap.

        Decided by a reachability power A^(gap + m) between the last vertex of
        left and the first vertex of right.
        """
        if gap < 0:
            msg = f"gap must be non-negative, not {gap}"
            raise ArgumentError(msg)
        tails = self.last_states(left)
        heads = self.first_states(right)
        if not tails or not heads:
            return False
        reach = self.reach(gap + self.block_length)
        return bool(reach[np.ix_(tails, heads)].any())

    def orbit_segment(self, seed: Seed, length: int) -> Word:
        """Coding of a point's forward orbit.

        :param seed: a word w, giving the periodic point w w w ...; an int, giving
            a walk from numpy's default_rng(seed) choosing successors uniformly; or
            None for the walk with seed 0
        :param length: number of symbols
        :return: word of the requested length
        :raise ArgumentError: if a periodic seed word is not admissible cyclically
        """
        if length < 0:
            msg = f"length must be non-negative, not {length}"
            raise ArgumentError(msg)
        if seed is None or isinstance(seed, int):
            return self.random_walk(length, 0 if seed is None else seed)
        cycle = as_word(seed)
        if not cycle:
            msg = "periodic seed must be nonempty"
            raise ArgumentError(msg)
        reps = -(-(self.block_length + 1) // len(cycle)) + 1
        if not self.is_admissible(cycle * reps):
            msg = f"{cycle} does not repeat to a point of {self.name}"
            raise ArgumentError(msg)
        reps = -(-length // len(cycle))
        return (cycle * reps)[:length]

    def random_walk(
        self,
        length: int,
        seed: int,
        weights: Sequence[Sequence[float]] | None = None,
    ) -> Word:
        """Seeded walk on the vertex graph.

        :param length: number of symbols
        :param seed: numpy rng seed
        :param weights: optional row-stochastic matrix on vertices, default uniform
            over successors
        """
        rng = np.random.default_rng(seed)
        state = int(rng.integers(len(self.states)))
        word = list(self.states[state])
        while len(word) < length:
            row = np.flatnonzero(self.adjacency[state])
            if weights is None:
                state = int(row[rng.integers(len(row))])
            else:
                probs = np.asarray([weights[state][j] for j in row], dtype=float)
                state = int(rng.choice(row, p=probs / probs.sum()))
            word.append(self.states[state][-1])
        return tuple(word[:length])

    def restricted(self, extra: Iterable[WordLike], name: str | None = None) -> SFT:
        """Subsystem with more forbidden words."""
        more = [*self.forbidden, *(as_word(w) for w in extra)]
        return SFT(self.alphabet, more, self.caps, name or self.name)

    def describe(self) -> dict[str, Any]:
        return {
            "type": "sft",
            "name": self.name,
            "alphabet": self.alphabet,
            "forbidden": ["".join(map(str, w)) for w in self.forbidden],
            "block_length": self.block_length,
            "vertices": len(self.states),
        }


class FullShift(SFT):
    """All sequences over range(alphabet)."""

    def __init__(self, alphabet: int, caps: Caps = DEFAULT_CAPS) -> None:
        super().__init__(alphabet, (), caps, name=f"FullShift({alphabet})")

    def describe(self) -> dict[str, Any]:
        return {"type": "full", "name": self.name, "alphabet": self.alphabet}


class Substitution(Subshift):
    """Shift generated by a primitive substitution."""

    def __init__(
        self,
        rules: Sequence[WordLike],
        caps: Caps = DEFAULT_CAPS,
        name: str | None = None,
    ) -> None:
        """Validate rules and check primitivity.

        :param rules: rules[a] is the image of symbol a
        :raise InvalidSubshiftError: if a rule is empty, uses a symbol outside the
            alphabet, or the substitution matrix is not primitive
        """
        images = tuple(as_word(r) for r in rules)
        super().__init__(len(images), name or "Substitution", caps)
        for image in images:
            if not image:
                msg = "substitution rules must be nonempty"
                raise InvalidSubshiftError(msg)
            check_alphabet(image, self.alphabet)
        self.rules = images
        self.matrix = np.zeros((self.alphabet, self.alphabet), dtype=np.int64)
        for a, image in enumerate(images):
            for b in image:
                self.matrix[a, b] += 1
        wielandt = (self.alphabet - 1) ** 2 + 1
        if not boolean_power(self.matrix, wielandt).all():
            msg = par(
                f"""substitution {self.rule_text()} is not primitive: no power of
                its matrix up to {wielandt} is positive."""
            )
            raise InvalidSubshiftError(msg)

    def rule_text(self) -> str:
        """Rules as 'a->image' pairs."""
        return ", ".join(
            f"{a}->{''.join(map(str, r))}" for a, r in enumerate(self.rules)
        )

    def apply(self, word: Sequence[int], times: int = 1) -> Word:
        """Image of word under the substitution iterated times.

        :raise ResourceCapError: if the image outgrows caps.max_word_length
        """
        result = tuple(word)
        for _ in range(times):
            size = sum(len(self.rules[a]) for a in result)
            self.caps.check("max_word_length", size, "substitution image")
            result = tuple(b for a in result for b in self.rules[a])
        return result

    @cached_property
    def two_blocks(self) -> frozenset[Word]:
        """Admissible 2-blocks, closed under taking 2-blocks of images."""
        found = {img[i : i + 2] for img in self.rules for i in range(len(img) - 1)}
        frontier = set(found)
        while frontier:
            new: set[Word] = set()
            for pair in frontier:
                image = self.apply(pair)
                new.update(image[i : i + 2] for i in range(len(image) - 1))
            frontier = new - found
            found |= new
        return frozenset(found)

    def _build_language(self, n: int) -> list[Word]:
        if n == 1:
            return [(a,) for a in range(self.alphabet)]
        power = 0
        while min(len(self.apply((a,), power)) for a in range(self.alphabet)) < n - 1:
            power += 1
        blocks: set[Word] = set()
        for pair in sorted(self.two_blocks):
            image = self.apply(pair, power)
            blocks.update(image[i : i + n] for i in range(len(image) - n + 1))
        self.caps.check("max_states", len(blocks), f"language of length {n}")
        return list(blocks)

    @property
    def is_finite(self) -> bool:
        """Morse-Hedlund: periodic iff some n has at most n blocks of length n."""
        return any(len(self.language(n)) <= n for n in range(1, 33))

    def orbit_segment(self, seed: Seed, length: int) -> Word:
        """Prefix of the one-sided fixed point of a power of the substitution.

        :param seed: starting symbol (int, default 0). Iteration follows the
            first-letter map until it cycles back to a symbol whose image begins
            with it.
        """
        symbol = 0 if seed is None else seed
        if not isinstance(symbol, int):
            symbol = as_word(symbol)[0]
        seen: list[int] = []
        while symbol not in seen:
            seen.append(symbol)
            symbol = self.rules[symbol][0]
        cycle = seen[seen.index(symbol) :]
        power = len(cycle)
        word: Word = (symbol,)
        while len(word) < length:
            grown = self.apply(word, power)
            if len(grown) == len(word):
                msg = f"{self.rule_text()} does not grow from {symbol}"
                raise InvalidSubshiftError(msg)
            word = grown
        return word[:length]

    def describe(self) -> dict[str, Any]:
        return {
            "type": "substitution",
            "name": self.name,
            "rules": ["".join(map(str, r)) for r in self.rules],
        }


class Sturmian(Subshift):
    """Coding of the rotation by p/q.

    x_n = 0 iff {intercept + n p/q} lies in [0, 1 - p/q). Rational rotation
    numbers make the coding periodic with period q; the irrational system is
    approached through convergents.
    """

    def __init__(
        self,
        p: int,
        q: int,
        intercept: Fraction | int | str = 0,
        caps: Caps = DEFAULT_CAPS,
        name: str | None = None,
    ) -> None:
        """
        :raise InvalidSubshiftError: unless 0 < p < q, q >= 2, gcd(p, q) = 1
        """
        if not (q >= 2 and 0 < p < q and math.gcd(p, q) == 1):
            msg = f"rotation number {p}/{q} must be reduced with 0 < p < q"
            raise InvalidSubshiftError(msg)
        super().__init__(2, name or f"Sturmian({p}/{q})", caps)
        self.p = p
        self.q = q
        self.rotation = Fraction(p, q)
        self.intercept = Fraction(intercept) % 1
        self.cycle: Word = tuple(self.code(n) for n in range(q))

    def code(self, n: int) -> int:
        """Symbol at time n of the coded point."""
        phase = (self.intercept + n * self.rotation) % 1
        return 0 if phase < 1 - self.rotation else 1

    def _build_language(self, n: int) -> list[Word]:
        extended = self.cycle * (n // self.q + 2)
        return [extended[i : i + n] for i in range(self.q)]

    @property
    def is_finite(self) -> bool:
        return True

    def orbit_segment(self, seed: Seed, length: int) -> Word:
        """Coding of times start .. start + length - 1.

        :param seed: int start time, default 0
        """
        start = seed if isinstance(seed, int) else 0
        return tuple(self.code(start + n) for n in range(length))

    def describe(self) -> dict[str, Any]:
        return {
            "type": "sturmian",
            "name": self.name,
            "p": self.p,
            "q": self.q,
            "intercept": str(self.intercept),
        }


def language(subshift: Subshift, n: int) -> tuple[Word, ...]:
    """Admissible n-blocks of subshift, sorted."""
    return subshift.language(n)


def orbit_segment(subshift: Subshift, seed: Seed, length: int) -> Word:
    """Coding of length symbols of a point chosen by seed."""
    return subshift.orbit_segment(seed, length)


def golden_mean(caps: Caps = DEFAULT_CAPS) -> SFT:
    """The SFT on {0, 1} forbidding 11."""
    return SFT(2, ["11"], caps, name="GoldenMean")


def morse(caps: Caps = DEFAULT_CAPS) -> Substitution:
    """The Thue-Morse substitution 0 -> 01, 1 -> 10."""
    return Substitution(["01", "10"], caps, name="Morse")


def random_irreducible_sft(
    seed: int, max_symbols: int = 4, caps: Caps = DEFAULT_CAPS
) -> SFT:
    """Deterministic pseudo-random irreducible aperiodic SFT.

    Between 2 and max_symbols symbols, forbidding at most alphabet - 1 two-words,
    redrawn until every symbol is essential and the graph is irreducible with
    period 1.

    :param seed: numpy rng seed
    :param max_symbols: largest alphabet drawn
    :raise ResourceCapError: if caps.max_search_candidates draws all fail
    """
    if max_symbols < 2:
        msg = f"max_symbols must be at least 2, not {max_symbols}"
        raise ArgumentError(msg)
    rng = np.random.default_rng(seed)
    draws = caps.max_search_candidates
    for _ in range(draws):
        alphabet = int(rng.integers(2, max_symbols + 1))
        pairs = [(a, b) for a in range(alphabet) for b in range(alphabet)]
        count = int(rng.integers(0, alphabet))
        picks = rng.choice(len(pairs), size=count, replace=False).tolist()
        forbidden = [pairs[i] for i in sorted(picks)]
        try:
            candidate = SFT(alphabet, forbidden, caps, name=f"RandomSFT({seed})")
        except InvalidSubshiftError:
            continue
        if len(candidate.states) != alphabet:
            continue
        components = strong_components(candidate.adjacency)
        if len(components) != 1:
            continue
        if graph_period(candidate.adjacency, components[0]) == 1:
            return candidate
    msg = f"no irreducible aperiodic SFT in {draws} draws from seed {seed}"
    raise ResourceCapError(msg, "max_search_candidates", draws)
