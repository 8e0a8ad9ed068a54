"""Finite words and a multi-pattern matching automaton.

A word is a tuple of ints in range(alphabet). Text forms are "0110" for alphabets
of at most ten symbols and "10,11,3" otherwise.

:author: Shay Hill
:created: 2024-03-02
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Sequence, Union

from symdyn.errors import ArgumentError

Word = tuple[int, ...]
WordLike = Union[str, Sequence[int]]


def as_word(value: WordLike) -> Word:
    """Convert a string or int sequence to a Word.

    :param value: "0110", "10,11,3", or a sequence of ints
    :return: tuple of ints
    :raise ArgumentError: if a symbol is not a non-negative int
    """
    if isinstance(value, str):
        text = value.strip()
        if "," in text:
            parts = [p.strip() for p in text.split(",") if p.strip()]
        else:
            parts = list(text)
        try:
            symbols = tuple(int(p) for p in parts)
        except ValueError as e:
            msg = f"cannot read word from {value!r}"
            raise ArgumentError(msg) from e
    else:
        symbols = tuple(int(x) for x in value)
    if any(x < 0 for x in symbols):
        msg = f"negative symbol in word {value!r}"
        raise ArgumentError(msg)
    return symbols


def word_str(word: Sequence[int]) -> str:
    """Text form of a word. Inverse of as_word."""
    if any(x > 9 for x in word):
        return ",".join(str(x) for x in word)
    return "".join(str(x) for x in word)


def check_alphabet(word: Word, alphabet: int) -> None:
    """Raise if word uses a symbol outside range(alphabet)."""
    bad = [x for x in word if x >= alphabet]
    if bad:
        msg = f"symbol {bad[0]} of {word_str(word)} outside alphabet {alphabet}"
        raise ArgumentError(msg)


def prefix_function(word: Sequence[int]) -> list[int]:
    """Knuth-Morris-Pratt failure function.

    :param word: any word
    :return: pi[i] = length of the longest proper border of word[: i + 1]
    """
    pi = [0] * len(word)
    k = 0
    for i in range(1, len(word)):
        while k and word[i] != word[k]:
            k = pi[k - 1]
        if word[i] == word[k]:
            k += 1
        pi[i] = k
    return pi


def is_unbordered(word: Sequence[int]) -> bool:
    """True if no proper prefix of word is also a suffix.

    Two occurrences of an unbordered word cannot overlap, so the cylinder [w] is
    disjoint from its first len(w) - 1 shifts.
    """
    return not word or prefix_function(word)[-1] == 0


def overlaps(left: Sequence[int], right: Sequence[int]) -> bool:
    """True if a suffix of left, shorter than both words, is a prefix of right."""
    top = min(len(left), len(right))
    return any(tuple(left[-k:]) == tuple(right[:k]) for k in range(1, top))


def is_overlap_free(words: Iterable[Sequence[int]]) -> bool:
    """True if no two occurrences of words from the set can overlap.

    Each word is unbordered and no pair has a cross overlap. Distinct words of
    equal length that pass this test mark disjoint cylinders with disjoint
    iterates up to that length.
    """
    items = [tuple(w) for w in words]
    if not all(is_unbordered(w) for w in items):
        return False
    for i, left in enumerate(items):
        for j, right in enumerate(items):
            if i == j:
                continue
            if len(right) < len(left) and occurrences(left, right):
                return False
            if overlaps(left, right):
                return False
    return True


def occurrences(text: Sequence[int], word: Sequence[int]) -> list[int]:
    """Start positions of every occurrence of word in text."""
    if not word:
        return list(range(len(text) + 1))
    pi = prefix_function(word)
    found: list[int] = []
    k = 0
    for i, x in enumerate(text):
        while k and x != word[k]:
            k = pi[k - 1]
        if x == word[k]:
            k += 1
        if k == len(word):
            found.append(i - k + 1)
            k = pi[k - 1]
    return found


class PatternAutomaton:
    """Aho-Corasick automaton with a complete transition table.

    State 0 is the root. ``delta[q][a]`` is the next state. ``hits[q]`` holds the
    indices of patterns ending at state q (through suffix links), and
    ``depth[q]`` the length of the longest pattern prefix q represents.
    """

    def __init__(self, patterns: Sequence[Word], alphabet: int) -> None:
        """Build the trie and fail links.

        :param patterns: nonempty words over range(alphabet)
        :param alphabet: number of symbols
        :raise ArgumentError: if a pattern is empty
        """
        if any(not p for p in patterns):
            msg = "empty pattern in automaton"
            raise ArgumentError(msg)
        self.patterns = tuple(patterns)
        self.alphabet = alphabet
        children: list[dict[int, int]] = [{}]
        self.depth = [0]
        ends: list[set[int]] = [set()]
        for idx, pattern in enumerate(self.patterns):
            check_alphabet(pattern, alphabet)
            state = 0
            for symbol in pattern:
                if symbol not in children[state]:
                    children.append({})
                    ends.append(set())
                    self.depth.append(self.depth[state] + 1)
                    children[state][symbol] = len(children) - 1
                state = children[state][symbol]
            ends[state].add(idx)

        fail = [0] * len(children)
        self.delta = [[0] * alphabet for _ in children]
        queue: deque[int] = deque()
        for a in range(alphabet):
            child = children[0].get(a)
            if child is not None:
                self.delta[0][a] = child
                queue.append(child)
        while queue:
            state = queue.popleft()
            ends[state] |= ends[fail[state]]
            for a in range(alphabet):
                child = children[state].get(a)
                if child is None:
                    self.delta[state][a] = self.delta[fail[state]][a]
                else:
                    fail[child] = self.delta[fail[state]][a]
                    self.delta[state][a] = child
                    queue.append(child)
        self.hits = [tuple(sorted(e)) for e in ends]

    @property
    def size(self) -> int:
        """Number of states."""
        return len(self.delta)

    def run(self, text: Sequence[int], state: int = 0) -> int:
        """State after reading text from state."""
        for symbol in text:
            state = self.delta[state][symbol]
        return state

    def find_all(self, text: Sequence[int]) -> list[tuple[int, int]]:
        """Every occurrence as (start, pattern index), sorted by start."""
        found: list[tuple[int, int]] = []
        state = 0
        for i, symbol in enumerate(text):
            state = self.delta[state][symbol]
            for idx in self.hits[state]:
                found.append((i - len(self.patterns[idx]) + 1, idx))
        return sorted(found)
