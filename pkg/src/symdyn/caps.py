"""Resource caps shared by every exact enumeration.

:author: Shay Hill
:created: 2024-03-02
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from paragraphs import par

from symdyn.errors import ResourceCapError


@dataclass(frozen=True)
class Caps:
    """Budgets for enumeration, search, and numerical precision.

    :param max_states: largest number of words, automaton states, or
        (state, count) pairs any exact step may hold
    :param max_word_length: longest word a substitution may be iterated to
    :param max_cover_nodes: branch-and-bound node budget for minimal subcovers
    :param max_search_candidates: good-point, marker and random-SFT candidates per call
    :param max_seed_length: longest seed word tried when building markers
    :param tolerance: slack for float comparisons of entropies and masses
    :param precision_bits: mpmath working precision for irrational rotations
    :param horizon: default return-time horizon for towers
    :param max_ip_depth: deepest finite-sum search in window classification
    :param max_sip_generators: largest generator list accepted by sip_set
    """

    max_states: int = 2**24
    max_word_length: int = 2**16
    max_cover_nodes: int = 200_000
    max_search_candidates: int = 64
    max_seed_length: int = 8
    tolerance: float = 1e-9
    precision_bits: int = 128
    horizon: int = 512
    max_ip_depth: int = 8
    max_sip_generators: int = 20

    def check(self, cap: str, value: int, what: str) -> None:
        """Raise if value exceeds the named cap.

        :param cap: name of a Caps field
        :param value: size about to be allocated or enumerated
        :param what: description of the thing being counted, for the message
        :raise ResourceCapError: if value > getattr(self, cap)
        """
        limit = int(getattr(self, cap))
        if value > limit:
            msg = par(
                f"""{what} needs {value} but cap {cap} is {limit}. Raise the cap or
                reduce the problem size."""
            )
            raise ResourceCapError(msg, cap, limit)

    def replace(self, **changes: int | float) -> Caps:
        """Return a copy with some fields changed."""
        return dataclasses.replace(self, **changes)  # type: ignore[arg-type]

    def as_dict(self) -> dict[str, int | float]:
        """Field values for reports."""
        return dataclasses.asdict(self)


DEFAULT_CAPS = Caps()
