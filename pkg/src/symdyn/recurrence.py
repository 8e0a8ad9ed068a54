"""Poincare recurrence stages and minimal subsystems of SFTs.

:author: Shay Hill
:created: 2024-03-27
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any

from symdyn.errors import ArgumentError, InvalidSubshiftError
from symdyn.markers import first_return_masses
from symdyn.subshifts import SFT, strong_components
from symdyn.words import Word, word_str

if TYPE_CHECKING:
    from symdyn.cylinders import CylinderUnion
    from symdyn.measures import MarkovMeasure, Mass
    from symdyn.subshifts import Subshift

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WanderingProfile:
    """masses[K - 1] is the mass of points of A that miss A at times 1 .. K."""

    base: Mass
    masses: tuple[Mass, ...]
    exact: bool

    @property
    def last(self) -> Mass:
        return self.masses[-1] if self.masses else self.base

    def describe(self) -> dict[str, Any]:
        return {
            "base": str(self.base),
            "masses": [str(m) for m in self.masses],
            "exact": self.exact,
        }


def wandering_profile(
    subshift: Subshift, cylinders: CylinderUnion, measure: MarkovMeasure, horizon: int
) -> WanderingProfile:
    """mu(A meet T^-1(X - A) meet ... meet T^-K(X - A)) for K <= horizon.

    These are the first-return tails of A, so they fall to 0.

    :raise ArgumentError: if A is empty, or the measure is not on subshift
    :raise ArithmeticError: if the masses ever increase
    """
    if not measure.is_supported_on(subshift):
        msg = f"{measure.name} is not a measure on {subshift.name}"
        raise ArgumentError(msg)
    if cylinders.is_nothing:
        msg = "A is empty"
        raise ArgumentError(msg)
    if cylinders.is_everything:
        return WanderingProfile(measure.one, (measure.zero,) * horizon, measure.exact)
    returns, _, base = first_return_masses(measure, sorted(cylinders.words), horizon)
    masses: list[Mass] = []
    left = base
    for k in range(1, horizon + 1):
        left = left - returns.get(k, measure.zero)
        masses.append(left)
    tol = 0 if measure.exact else 1e-12
    if any(b > a + tol for a, b in zip([base, *masses], masses)):
        msg = "wandering masses increased"
        raise ArithmeticError(msg)
    return WanderingProfile(base, tuple(masses), measure.exact)


@dataclass(frozen=True)
class MinimalSubsystem:
    """The SFT left after forbidding every cylinder some point avoids.

    ``period`` is the length of the single periodic orbit left, or None if the
    word length did not reach a minimal system.
    """

    system: SFT
    forbidden: tuple[Word, ...]
    period: int | None

    def describe(self) -> dict[str, Any]:
        return {
            "system": self.system.describe(),
            "forbidden": [word_str(w) for w in self.forbidden],
            "period": self.period,
        }


def _avoidable(system: SFT, word: Word) -> SFT | None:
    """The subsystem of points that never show word, if it has points."""
    try:
        return system.restricted([word])
    except InvalidSubshiftError:
        return None


def minimal_subsystem(subshift: SFT, max_word_length: int) -> MinimalSubsystem:
    """Scan cylinders in length-lex order; forbid any whose orbit misses a point.

    :param subshift: starting SFT
    :param max_word_length: longest cylinder word scanned
    """
    if max_word_length < 1:
        msg = f"max_word_length must be positive, not {max_word_length}"
        raise ArgumentError(msg)
    system = subshift
    forbidden: list[Word] = []
    for n in range(1, max_word_length + 1):
        for word in system.language(n):
            if not system.is_admissible(word):
                continue
            smaller = _avoidable(system, word)
            if smaller is not None:
                logger.debug("forbid %s", word_str(word))
                forbidden.append(word)
                system = smaller
    period = None
    if system.is_finite and len(strong_components(system.adjacency)) == 1:
        period = len(system.states)
    return MinimalSubsystem(system, tuple(forbidden), period)
