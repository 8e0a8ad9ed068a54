"""Test integer window sets, finite sums, Bohr sets, and Weyl averages.

:author: Shay Hill
:created: 2024-04-08
"""

import math
from fractions import Fraction

import numpy as np
import pytest
from mpmath import mp

from symdyn.caps import DEFAULT_CAPS
from symdyn.errors import ArgumentError, ResourceCapError
from symdyn.families import (
    BohrSpec,
    IntegerWindowSet,
    SequenceSpec,
    bohr_membership,
    classify_window,
    difference_set,
    distance_to_integer,
    ip_set,
    parse_real,
    recurrence_sweep,
    rotation_recurrence,
    sip_set,
    weyl_average,
    working_bits,
)


class TestParseReal:
    def test_product(self) -> None:
        value = parse_real("2*pi*sqrt2m1")
        assert float(value) == pytest.approx(2 * math.pi * (math.sqrt(2) - 1))

    def test_forms(self) -> None:
        assert float(parse_real("-1/4")) == -0.25
        assert float(parse_real("sqrt(7)")) == pytest.approx(math.sqrt(7))
        assert float(parse_real("golden")) == pytest.approx((math.sqrt(5) - 1) / 2)
        assert float(parse_real(Fraction(3, 8))) == 0.375

    def test_unreadable(self) -> None:
        with pytest.raises(ArgumentError) as err:
            _ = parse_real("tau")
        assert "cannot read" in err.value.args[0]

    def test_distance_to_integer(self) -> None:
        assert float(distance_to_integer(mp.mpf("2.75"))) == 0.25

    def test_working_bits(self) -> None:
        assert working_bits(10**6) == DEFAULT_CAPS.precision_bits
        assert working_bits(2**100) == 64 + 101


class TestIntegerWindowSet:
    def test_members(self) -> None:
        found = IntegerWindowSet.from_members([1, 3, 9], 0, 5)
        assert found.members() == [1, 3]
        assert 3 in found
        assert 9 not in found
        assert len(found) == 2
        assert found.horizon == 5

    def test_negated(self) -> None:
        found = IntegerWindowSet.from_members([1, 3], 0, 5).negated()
        assert (found.lo, found.hi) == (-5, 0)
        assert found.members() == [-3, -1]

    def test_restricted(self) -> None:
        found = IntegerWindowSet.from_members([1, 3], 0, 5).restricted(2, 9)
        assert (found.lo, found.hi) == (2, 5)
        assert found.members() == [3]

    def test_subset_on_shared_window(self) -> None:
        small = IntegerWindowSet.from_members([2, 4, 40], 0, 50)
        evens = IntegerWindowSet.from_members(range(0, 11, 2), 0, 10)
        assert small.issubset(evens)

    def test_flag_count(self) -> None:
        with pytest.raises(ArgumentError):
            _ = IntegerWindowSet(0, 5, np.zeros(3, dtype=bool))


class TestClassifyWindow:
    def test_evens(self) -> None:
        evens = IntegerWindowSet.from_members(range(0, 101, 2), 0, 100)
        found = classify_window(evens)
        assert found.syndetic_gap == 2
        assert found.thick_run == 1
        assert found.ip_depth >= 3
        assert ip_set(found.ip_generators).issubset(evens)

    def test_squares(self) -> None:
        squares = IntegerWindowSet.from_members([j * j for j in range(1, 11)], 0, 100)
        found = classify_window(squares)
        assert found.syndetic_gap == 19
        assert found.ip_depth >= 2
        assert found.ip_exhaustive

    def test_interval(self) -> None:
        run = IntegerWindowSet.from_members(range(10, 30), 0, 40)
        assert classify_window(run).thick_run == 20

    def test_depth_cap(self) -> None:
        evens = IntegerWindowSet.from_members(range(0, 101, 2), 0, 100)
        caps = DEFAULT_CAPS.replace(max_ip_depth=2)
        assert classify_window(evens, caps).ip_depth == 2

    def test_empty(self) -> None:
        found = classify_window(IntegerWindowSet.from_members([], 0, 10))
        assert found.syndetic_gap is None
        assert found.thick_run == 0
        assert found.ip_depth == 0


class TestFiniteSums:
    def test_difference_set(self) -> None:
        found = difference_set([1, 4, 6])
        assert (found.lo, found.hi) == (0, 5)
        assert found.members() == [2, 3, 5]

    def test_difference_set_order(self) -> None:
        with pytest.raises(ArgumentError):
            _ = difference_set([4, 1])

    def test_ip_set(self) -> None:
        assert ip_set([3, 5]).members() == [3, 5, 8]
        assert ip_set([1, 2]).members() == [1, 2, 3]

    def test_sip_set(self) -> None:
        """Differences of {0, 3, 5, 8}."""
        assert sip_set([3, 5]).members() == [2, 3, 5, 8]

    def test_ip_inside_sip(self) -> None:
        gens = [2, 7, 11, 30]
        assert ip_set(gens).issubset(sip_set(gens))

    def test_generators(self) -> None:
        with pytest.raises(ArgumentError):
            _ = ip_set([0, 2])

    def test_generator_cap(self) -> None:
        with pytest.raises(ResourceCapError) as err:
            _ = sip_set(list(range(1, 22)))
        assert err.value.cap == "max_sip_generators"


class TestBohr:
    def test_sqrt2_minus_one(self) -> None:
        found = bohr_membership(BohrSpec(("sqrt2m1",), 0.05), 100)
        for n in (0, 12, 29, 70, -12):
            assert n in found
        for n in (1, 2, 5):
            assert n not in found
        assert found.notes["precision_bits"] == DEFAULT_CAPS.precision_bits

    def test_rational(self) -> None:
        found = bohr_membership(BohrSpec(("1/4",), Fraction(1, 8)), 12)
        assert found.members() == [-12, -8, -4, 0, 4, 8, 12]

    def test_large_eps(self) -> None:
        found = bohr_membership(BohrSpec(("pi",), 0.5), 10)
        assert len(found) == 21

    def test_two_frequencies(self) -> None:
        both = bohr_membership(BohrSpec(("sqrt2", "sqrt3"), 0.1), 200)
        one = bohr_membership(BohrSpec(("sqrt2",), 0.1), 200)
        assert both.issubset(one)

    def test_spec(self) -> None:
        with pytest.raises(ArgumentError):
            _ = BohrSpec((), 0.1)
        with pytest.raises(ArgumentError):
            _ = BohrSpec(("sqrt2",), 0)

    def test_cap(self) -> None:
        caps = DEFAULT_CAPS.replace(max_states=100)
        with pytest.raises(ResourceCapError):
            _ = bohr_membership(BohrSpec(("sqrt2",), 0.1), 100, caps)


class TestSequenceSpec:
    def test_terms(self) -> None:
        assert list(SequenceSpec("squares", cap=5).terms()) == [1, 4, 9, 16, 25]
        assert list(SequenceSpec("arithmetic", 3, 3, 2).terms()) == [3, 5, 7]
        assert list(SequenceSpec("lacunary", 4, 1, 2).terms()) == [1, 2, 4, 8]
        assert list(SequenceSpec("explicit", 2, values=(1, 5, 9)).terms()) == [1, 5]

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"kind": "primes"},
            {"kind": "lacunary", "step": 1},
            {"kind": "explicit", "values": (3, 3)},
            {"kind": "squares", "cap": 0},
        ],
    )
    def test_invalid(self, kwargs: dict[str, object]) -> None:
        with pytest.raises(ArgumentError):
            _ = SequenceSpec(**kwargs)  # type: ignore[arg-type]


class TestWeyl:
    @pytest.mark.parametrize("alpha", ["2*pi*sqrt2m1", "2*pi*golden"])
    def test_squares_equidistribute(self, alpha: str) -> None:
        squares = SequenceSpec("squares", cap=10**5)
        found = weyl_average(squares, alpha, 10**5)
        assert found.magnitude < 0.05
        assert found.error_bound < 1e-12

    def test_zero_angle(self) -> None:
        found = weyl_average(SequenceSpec("arithmetic", cap=10), 0, 10)
        assert found.magnitude == pytest.approx(1)

    def test_half_turn(self) -> None:
        """exp(i pi k^2) alternates in sign."""
        found = weyl_average(SequenceSpec("squares", cap=100), "pi", 100)
        assert found.magnitude == pytest.approx(0, abs=1e-12)

    def test_term_count(self) -> None:
        with pytest.raises(ArgumentError):
            _ = weyl_average(SequenceSpec("squares", cap=10), "pi", 11)


class TestRotationRecurrence:
    def test_squares_return(self) -> None:
        hit = rotation_recurrence("sqrt2", 1e-2, SequenceSpec("squares", cap=10**4))
        assert hit.found
        assert hit.index is not None
        assert hit.d == hit.index**2
        assert hit.distance is not None
        assert hit.distance < 1e-2
        for j in range(1, hit.index):
            value = j * j * math.sqrt(2)
            assert abs(value - round(value)) >= 1e-2

    def test_no_return(self) -> None:
        odds = SequenceSpec("arithmetic", cap=50, start=1, step=2)
        hit = rotation_recurrence("1/2", 0.1, odds)
        assert not hit.found
        assert hit.checked == 50

    def test_sweep(self) -> None:
        odds = SequenceSpec("arithmetic", cap=50, start=1, step=2)
        hits = recurrence_sweep(odds, ["1/2", "1/3"], 0.1)
        assert [h.found for h in hits] == [False, True]
        assert hits[1].d == 3
