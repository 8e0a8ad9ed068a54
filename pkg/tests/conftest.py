"""Small subshifts and measures shared across tests.

Every fixture is module scoped. Subshifts cache their languages, so a shared
instance keeps repeated enumeration cheap.

:author: Shay Hill
:created: 2024-04-02
"""

import pytest

from symdyn.measures import MarkovMeasure, bernoulli
from symdyn.subshifts import SFT, FullShift, Substitution, golden_mean, morse


@pytest.fixture(scope="module")
def golden() -> SFT:
    """No two adjacent 1s."""
    return golden_mean()


@pytest.fixture(scope="module")
def full() -> FullShift:
    return FullShift(2)


@pytest.fixture(scope="module")
def period_two() -> SFT:
    """The single orbit of ...0101..."""
    return SFT(2, ["00", "11"], name="PeriodTwo")


@pytest.fixture(scope="module")
def two_shifts() -> SFT:
    """A full 2-shift on {0, 1} that may pass once into a full 2-shift on {2, 3}."""
    return SFT(4, ["20", "21", "30", "31"], name="TwoShifts")


@pytest.fixture(scope="module")
def morse_shift() -> Substitution:
    return morse()


@pytest.fixture(scope="module")
def fair_coin() -> MarkovMeasure:
    return bernoulli(["1/2", "1/2"], name="fair")
