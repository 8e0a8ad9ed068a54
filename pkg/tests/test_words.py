"""Test word helpers and the pattern automaton.

:author: Shay Hill
:created: 2024-04-02
"""

import pytest

from symdyn.errors import ArgumentError
from symdyn.words import (
    PatternAutomaton,
    as_word,
    check_alphabet,
    is_overlap_free,
    is_unbordered,
    occurrences,
    overlaps,
    prefix_function,
    word_str,
)


class TestAsWord:
    def test_digits(self) -> None:
        assert as_word("0110") == (0, 1, 1, 0)

    def test_commas_for_large_symbols(self) -> None:
        assert as_word("10,11,3") == (10, 11, 3)
        assert word_str((10, 11, 3)) == "10,11,3"

    def test_sequence(self) -> None:
        assert as_word([1, 0]) == (1, 0)

    def test_bad_text(self) -> None:
        with pytest.raises(ArgumentError) as err:
            _ = as_word("01x")
        assert "cannot read word" in err.value.args[0]

    def test_negative_symbol(self) -> None:
        with pytest.raises(ArgumentError):
            _ = as_word([0, -1])

    def test_alphabet(self) -> None:
        check_alphabet((0, 1), 2)
        with pytest.raises(ArgumentError) as err:
            check_alphabet((0, 2), 2)
        assert "outside alphabet 2" in err.value.args[0]


class TestBorders:
    def test_prefix_function(self) -> None:
        assert prefix_function((0, 1, 0, 0, 1, 0)) == [0, 0, 1, 1, 2, 3]

    @pytest.mark.parametrize("word", ["0", "01", "0011", "00101"])
    def test_unbordered(self, word: str) -> None:
        assert is_unbordered(as_word(word))

    @pytest.mark.parametrize("word", ["00", "010", "0110", "1011"])
    def test_bordered(self, word: str) -> None:
        assert not is_unbordered(as_word(word))

    def test_overlaps(self) -> None:
        assert overlaps((0, 0, 1), (0, 1, 1))
        assert not overlaps((0, 1), (0, 1))

    def test_overlap_free(self) -> None:
        assert is_overlap_free([(0, 0, 1), (0, 1, 1)]) is False
        assert is_overlap_free([(0, 0, 1, 1)])
        assert not is_overlap_free([(0, 1, 0)])


def test_occurrences() -> None:
    assert occurrences((0, 1, 0, 1, 0), (0, 1, 0)) == [0, 2]
    assert occurrences((0, 1), ()) == [0, 1, 2]


class TestPatternAutomaton:
    def test_find_all(self) -> None:
        automaton = PatternAutomaton([(1, 1), (0, 1)], 2)
        assert automaton.find_all((0, 1, 1, 1)) == [(0, 1), (1, 0), (2, 0)]

    def test_suffix_hits(self) -> None:
        """A pattern that is a suffix of another is reported with it."""
        automaton = PatternAutomaton([(0, 1, 1), (1, 1)], 2)
        assert automaton.find_all((0, 1, 1)) == [(0, 0), (1, 1)]

    def test_run(self) -> None:
        automaton = PatternAutomaton([(1, 1)], 2)
        state = automaton.run((0, 1, 1))
        assert automaton.hits[state] == (0,)

    def test_empty_pattern(self) -> None:
        with pytest.raises(ArgumentError):
            _ = PatternAutomaton([()], 2)
