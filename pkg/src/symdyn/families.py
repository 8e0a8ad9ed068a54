"""Integer sets on finite windows: difference, IP, SIP and Bohr sets.

Every set here is known only on a window [lo, hi] of integers, and every claim made
about it (bounded gaps, long runs, finite-sum structure) is a claim about that
window. Irrational frequencies are parsed and reduced mod 1 with mpmath at a
declared precision.

:author: Shay Hill
:created: 2024-03-21
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Iterator, Sequence

import numpy as np
from mpmath import mp
from paragraphs import par

from symdyn.caps import DEFAULT_CAPS, Caps
from symdyn.errors import ArgumentError

logger = logging.getLogger(__name__)

_NAMED_REALS = {
    "pi": lambda: mp.pi,
    "e": lambda: mp.e,
    "sqrt2": lambda: mp.sqrt(2),
    "sqrt2m1": lambda: mp.sqrt(2) - 1,
    "sqrt3": lambda: mp.sqrt(3),
    "sqrt5": lambda: mp.sqrt(5),
    "golden": lambda: (mp.sqrt(5) - 1) / 2,
    "phi": lambda: (1 + mp.sqrt(5)) / 2,
}

_SQRT = re.compile(r"sqrt\((\d+)\)")


def _parse_factor(text: str) -> Any:
    if text in _NAMED_REALS:
        return _NAMED_REALS[text]()
    root = _SQRT.fullmatch(text)
    if root:
        return mp.sqrt(int(root.group(1)))
    if "/" in text:
        num, den = text.split("/", 1)
        return mp.mpf(num) / mp.mpf(den)
    return mp.mpf(text)


def parse_real(spec: str | float | int | Fraction) -> Any:
    """A real number as an mpf at the current mpmath precision.

    Strings are products of factors joined by ``*``, with an optional leading
    minus: decimals, ``p/q``, ``sqrt(n)``, or a name (pi, e, sqrt2, sqrt2m1, sqrt3,
    sqrt5, golden, phi). ``"2*pi*sqrt2m1"`` is 2 pi (sqrt 2 - 1).

    :raise ArgumentError: on an unreadable factor
    """
    if isinstance(spec, Fraction):
        return mp.mpf(spec.numerator) / spec.denominator
    if not isinstance(spec, str):
        return mp.mpf(spec)
    text = spec.replace(" ", "").lower()
    sign = 1
    if text.startswith("-"):
        sign, text = -1, text[1:]
    value = mp.mpf(sign)
    try:
        for factor in text.split("*"):
            value *= _parse_factor(factor)
    except (ValueError, ZeroDivisionError) as err:
        msg = f"cannot read {spec!r} as a real number"
        raise ArgumentError(msg) from err
    return value


def distance_to_integer(value: Any) -> Any:
    """||x||, the distance from x to the nearest integer."""
    return abs(value - mp.nint(value))


def _exact(value: float | Fraction) -> Fraction:
    """Floats by their decimal text, so 0.05 is 1/20."""
    return Fraction(str(value)) if isinstance(value, float) else Fraction(value)


def working_bits(horizon: int, caps: Caps = DEFAULT_CAPS) -> int:
    """Precision for products n * lambda with |n| <= horizon."""
    return max(caps.precision_bits, 64 + max(horizon, 1).bit_length())


@dataclass(eq=False)
class IntegerWindowSet:
    """A set of integers known exactly on the window [lo, hi].

    :param lo: first integer of the window
    :param hi: last integer of the window
    :param flags: flags[i] says whether lo + i is a member
    :param provenance: how the set was made
    """

    lo: int
    hi: int
    flags: np.ndarray
    provenance: str = "explicit"
    notes: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.hi < self.lo - 1 or len(self.flags) != self.hi - self.lo + 1:
            msg = f"{len(self.flags)} flags for window [{self.lo}, {self.hi}]"
            raise ArgumentError(msg)

    @classmethod
    def from_members(
        cls, members: Iterable[int], lo: int, hi: int, provenance: str = "explicit"
    ) -> IntegerWindowSet:
        """Members outside [lo, hi] are dropped."""
        flags = np.zeros(hi - lo + 1, dtype=bool)
        for n in members:
            if lo <= n <= hi:
                flags[n - lo] = True
        return cls(lo, hi, flags, provenance)

    @property
    def horizon(self) -> int:
        return max(abs(self.lo), abs(self.hi))

    def __contains__(self, n: object) -> bool:
        if not isinstance(n, (int, np.integer)) or not self.lo <= n <= self.hi:
            return False
        return bool(self.flags[int(n) - self.lo])

    def __iter__(self) -> Iterator[int]:
        return iter(self.members())

    def __len__(self) -> int:
        return int(self.flags.sum())

    def members(self) -> list[int]:
        return [int(i) + self.lo for i in np.flatnonzero(self.flags)]

    def negated(self) -> IntegerWindowSet:
        return IntegerWindowSet(
            -self.hi, -self.lo, self.flags[::-1].copy(), f"-({self.provenance})"
        )

    def restricted(self, lo: int, hi: int) -> IntegerWindowSet:
        """The set on a sub-window."""
        lo, hi = max(lo, self.lo), min(hi, self.hi)
        return IntegerWindowSet(
            lo, hi, self.flags[lo - self.lo : hi - self.lo + 1].copy(), self.provenance
        )

    def issubset(self, other: IntegerWindowSet) -> bool:
        """Inclusion on the window both sets know."""
        return all(n in other for n in self if other.lo <= n <= other.hi)

    def describe(self) -> dict[str, Any]:
        return {
            "window": [self.lo, self.hi],
            "provenance": self.provenance,
            "size": len(self),
            "members": self.members(),
            **self.notes,
        }


@dataclass(frozen=True)
class WindowClassification:
    """Family evidence for a set, relative to its window.

    ``syndetic_gap`` is the largest distance between consecutive members (None for
    fewer than two), ``thick_run`` the longest run of consecutive members, and
    ``ip_depth`` the largest d found with IP{n_1..n_d} inside the set.
    """

    window: tuple[int, int]
    syndetic_gap: int | None
    thick_run: int
    ip_depth: int
    ip_generators: tuple[int, ...]
    ip_exhaustive: bool

    def describe(self) -> dict[str, Any]:
        return {
            "window": list(self.window),
            "syndetic_gap": self.syndetic_gap,
            "thick_run": self.thick_run,
            "ip_depth": self.ip_depth,
            "ip_generators": list(self.ip_generators),
            "ip_exhaustive": self.ip_exhaustive,
        }


def _longest_run(flags: np.ndarray) -> int:
    if not flags.any():
        return 0
    padded = np.concatenate([[0], flags.astype(np.int8), [0]])
    edges = np.flatnonzero(np.diff(padded))
    return int((edges[1::2] - edges[::2]).max())


def _ip_search(
    members: IntegerWindowSet, cap: int, max_nodes: int
) -> tuple[tuple[int, ...], bool]:
    """Deepest IP generator list inside the set, depth-first, small generators first.

    Returns the generators and whether the search finished within max_nodes.
    """
    positive = [n for n in members if n > 0]
    best: tuple[int, ...] = ()
    nodes = 0

    def extend(gens: tuple[int, ...], sums: frozenset[int]) -> bool:
        nonlocal best, nodes
        if len(gens) > len(best):
            best = gens
        if len(best) >= cap:
            return True
        nodes += 1
        if nodes > max_nodes:
            return True
        last = gens[-1] if gens else 0
        for g in positive:
            if g <= last or g + max(sums) > members.hi:
                continue
            if all(s + g in members for s in sums):
                if extend((*gens, g), sums | {s + g for s in sums}):
                    return True
        return False

    extend((), frozenset([0]))
    return best, nodes <= max_nodes


def classify_window(
    members: IntegerWindowSet, caps: Caps = DEFAULT_CAPS
) -> WindowClassification:
    """Largest gap, longest run, and IP depth of a set on its window.

    :param members: the set
    :param caps: max_ip_depth bounds the IP search depth, max_cover_nodes its size
    """
    found = members.members()
    gap = max((b - a for a, b in zip(found, found[1:])), default=None)
    generators, exhaustive = _ip_search(
        members, caps.max_ip_depth, caps.max_cover_nodes
    )
    return WindowClassification(
        (members.lo, members.hi),
        gap,
        _longest_run(members.flags),
        len(generators),
        generators,
        exhaustive,
    )


def _confirm_increasing(values: Sequence[int], what: str) -> None:
    if any(b <= a for a, b in zip(values, values[1:])):
        msg = f"{what} must be strictly increasing"
        raise ArgumentError(msg)


def difference_set(values: Sequence[int]) -> IntegerWindowSet:
    """D+(A) = {a_n - a_m : n > m} on the window [0, max A - min A].

    :raise ArgumentError: if values are not strictly increasing
    """
    values = [int(v) for v in values]
    _confirm_increasing(values, "A")
    span = values[-1] - values[0] if values else 0
    flags = np.zeros(span + 1, dtype=bool)
    for i, a in enumerate(values):
        for b in values[i + 1 :]:
            flags[b - a] = True
    return IntegerWindowSet(0, span, flags, "difference-set")


def _confirm_generators(gens: Sequence[int], caps: Caps) -> list[int]:
    values = [int(g) for g in gens]
    if not values or any(g < 1 for g in values):
        msg = "IP generators must be a nonempty list of positive integers"
        raise ArgumentError(msg)
    caps.check("max_sip_generators", len(values), "IP generator list")
    caps.check("max_states", 2 * sum(values) + 1, "finite-sum window")
    return values


def ip_set(gens: Sequence[int], caps: Caps = DEFAULT_CAPS) -> IntegerWindowSet:
    """IP{n_1..n_d}: sums of nonempty subsets of the generators.

    :raise ResourceCapError: past max_sip_generators or max_states
    """
    values = _confirm_generators(gens, caps)
    total = sum(values)
    reach = np.zeros(total + 1, dtype=bool)
    reach[0] = True
    for g in values:
        reach[g:] |= reach[:-g].copy()
    sums = IntegerWindowSet(0, total, reach, "IP-generated")
    sums.flags[0] = False
    sums.notes["generators"] = values
    return sums


def sip_set(gens: Sequence[int], caps: Caps = DEFAULT_CAPS) -> IntegerWindowSet:
    """SIP{n_i}: positive differences of elements of IP{n_i} with 0 added.

    A difference of two subset sums is a signed sum with signs in {-1, 0, 1}, so
    the set is built one generator at a time on [-total, total].

    :raise ResourceCapError: past max_sip_generators or max_states
    """
    values = _confirm_generators(gens, caps)
    total = sum(values)
    reach = np.zeros(2 * total + 1, dtype=bool)
    reach[total] = True
    for g in values:
        step = reach.copy()
        step[g:] |= reach[:-g]
        step[:-g] |= reach[g:]
        reach = step
    flags = reach[total:].copy()
    flags[0] = False
    result = IntegerWindowSet(0, total, flags, "SIP-generated")
    result.notes["generators"] = values
    return result


@dataclass(frozen=True)
class BohrSpec:
    """V(lambda_1..lambda_k; eps) = {n : max_j ||n lambda_j|| < eps}.

    Frequencies are strings for parse_real, or exact numbers.
    """

    frequencies: tuple[str | float | Fraction, ...]
    eps: float | Fraction

    def __post_init__(self) -> None:
        if not self.frequencies:
            msg = "a Bohr set needs at least one frequency"
            raise ArgumentError(msg)
        if not self.eps > 0:
            msg = f"eps must be positive, not {self.eps}"
            raise ArgumentError(msg)


def bohr_membership(
    spec: BohrSpec, horizon: int, caps: Caps = DEFAULT_CAPS
) -> IntegerWindowSet:
    """The Bohr set on [-H, H], computed at a declared precision.

    Every eps >= 1/2 gives all of the window.

    :raise ResourceCapError: if the window passes max_states
    """
    caps.check("max_states", 2 * horizon + 1, "Bohr window")
    bits = working_bits(horizon, caps)
    flags = np.zeros(2 * horizon + 1, dtype=bool)
    with mp.workprec(bits):
        eps = parse_real(_exact(spec.eps))
        if eps >= mp.mpf(1) / 2:
            flags[:] = True
        else:
            lams = [parse_real(f) for f in spec.frequencies]
            for i, n in enumerate(range(-horizon, horizon + 1)):
                flags[i] = max(distance_to_integer(n * lam) for lam in lams) < eps
    result = IntegerWindowSet(-horizon, horizon, flags, "Bohr")
    result.notes["precision_bits"] = bits
    return result


@dataclass(frozen=True)
class SequenceSpec:
    """A strictly increasing sequence s_1 < s_2 < ..., the first ``cap`` terms.

    :param kind: squares, arithmetic, lacunary, or explicit
    :param cap: number of terms
    :param start: first base term (squares: s_j = (start + (j-1) step)^2;
        arithmetic: s_j = start + (j-1) step; lacunary: s_j = start * step^(j-1))
    :param step: difference or ratio
    :param values: the terms of an explicit sequence
    """

    kind: str
    cap: int = 1000
    start: int = 1
    step: int = 1
    values: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in {"squares", "arithmetic", "lacunary", "explicit"}:
            msg = f"unknown sequence kind {self.kind!r}"
            raise ArgumentError(msg)
        if self.kind == "lacunary" and (self.step < 2 or self.start < 1):
            msg = "a lacunary sequence needs start >= 1 and ratio >= 2"
            raise ArgumentError(msg)
        if self.kind in {"squares", "arithmetic"} and (self.step < 1 or self.start < 0):
            msg = f"{self.kind} needs start >= 0 and step >= 1"
            raise ArgumentError(msg)
        if self.kind == "explicit":
            _confirm_increasing(self.values, "an explicit sequence")
        if self.cap < 1:
            msg = f"sequence cap must be positive, not {self.cap}"
            raise ArgumentError(msg)

    def terms(self, count: int | None = None) -> Iterator[int]:
        """The first min(count, cap) terms."""
        count = self.cap if count is None else min(count, self.cap)
        if self.kind == "explicit":
            yield from self.values[:count]
            return
        for j in range(count):
            if self.kind == "squares":
                yield (self.start + j * self.step) ** 2
            elif self.kind == "arithmetic":
                yield self.start + j * self.step
            else:
                yield self.start * self.step**j

    def describe(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "cap": self.cap,
            "start": self.start,
            "step": self.step,
            "values": list(self.values),
        }


@dataclass(frozen=True)
class WeylAverage:
    """|(1/n) sum_k exp(i alpha s_k)| with an absolute error bound."""

    magnitude: float
    error_bound: float
    n: int
    precision_bits: int

    def describe(self) -> dict[str, Any]:
        return {
            "magnitude": self.magnitude,
            "error_bound": self.error_bound,
            "n": self.n,
            "precision_bits": self.precision_bits,
        }


def weyl_average(
    sequence: SequenceSpec,
    alpha: str | float | Fraction,
    n: int,
    caps: Caps = DEFAULT_CAPS,
) -> WeylAverage:
    """Magnitude of the Weyl average of a sequence at angle alpha.

    Phases alpha s_k / 2 pi are reduced mod 1 in mpmath, then cosines and sines
    are summed with math.fsum.

    :param alpha: angle in radians, any parse_real spec ("2*pi*sqrt2m1")
    :param n: number of terms
    :raise ArgumentError: if the sequence has fewer than n terms
    :raise ResourceCapError: past max_states terms
    """
    if n < 1 or n > sequence.cap:
        msg = f"need 1 <= n <= {sequence.cap} terms, not {n}"
        raise ArgumentError(msg)
    caps.check("max_states", n, "Weyl sum terms")
    terms = list(sequence.terms(n))
    bits = working_bits(max(terms), caps)
    with mp.workprec(bits):
        turns = parse_real(alpha) / (2 * mp.pi)
        phases = [float(mp.frac(s * turns)) for s in terms]
    real = math.fsum(math.cos(2 * math.pi * t) for t in phases)
    imag = math.fsum(math.sin(2 * math.pi * t) for t in phases)
    magnitude = math.hypot(real, imag) / n
    # float phases and the float cos/sin each lose a few ulps per term
    bound = 2 * math.pi * 2.0**-52 + 4 * 2.0**-53
    return WeylAverage(magnitude, bound, n, bits)


@dataclass(frozen=True)
class RotationHit:
    """The least d in D with ||d alpha|| < eps, if one was found within the cap."""

    alpha: str
    eps: float
    d: int | None
    index: int | None
    distance: float | None
    checked: int

    @property
    def found(self) -> bool:
        return self.d is not None

    def describe(self) -> dict[str, Any]:
        return {
            "alpha": self.alpha,
            "eps": self.eps,
            "found": self.found,
            "d": self.d,
            "index": self.index,
            "distance": self.distance,
            "checked": self.checked,
        }


def rotation_recurrence(
    alpha: str | float | Fraction,
    eps: float | Fraction,
    sequence: SequenceSpec,
    caps: Caps = DEFAULT_CAPS,
) -> RotationHit:
    """Least term d of a sequence with ||d alpha|| < eps; not found is a value.

    :param alpha: rotation number (in turns)
    """
    checked = 0
    terms = list(sequence.terms())
    bits = working_bits(max(terms), caps)
    with mp.workprec(bits):
        rotation = parse_real(alpha)
        bound = parse_real(_exact(eps))
        for j, d in enumerate(terms, start=1):
            checked = j
            distance = distance_to_integer(d * rotation)
            if distance < bound:
                logger.debug("rotation %s returns at d=%d", alpha, d)
                return RotationHit(str(alpha), float(eps), d, j, float(distance), j)
    return RotationHit(str(alpha), float(eps), None, None, None, checked)


def recurrence_sweep(
    sequence: SequenceSpec,
    alphas: Sequence[str | float | Fraction],
    eps: float | Fraction,
    caps: Caps = DEFAULT_CAPS,
) -> list[RotationHit]:
    """rotation_recurrence over many rotation numbers. Asserts nothing."""
    hits = [rotation_recurrence(a, eps, sequence, caps) for a in alphas]
    missed = [h.alpha for h in hits if not h.found]
    if missed:
        logger.info(
            par(
                f"""{len(missed)} of {len(hits)} rotations did not return within
                {sequence.cap} terms of the sequence."""
            )
        )
    return hits
