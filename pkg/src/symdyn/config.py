"""Read a system, cover, and measure family from a JSON document.

A document is either a bare system::

    {"type": "sft", "alphabet": 2, "forbidden": ["11"]}

or a run with an optional cover and family::

    {"system": {...}, "cover": {"kind": "symbols"}, "family": [{"kind": "parry"}]}

Unknown fields are rejected. Every failure becomes a ConfigError naming the
offending field.

:author: Shay Hill
:created: 2024-03-29
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from pathlib import Path
from typing import TYPE_CHECKING, Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from symdyn.caps import DEFAULT_CAPS, Caps
from symdyn.cylinders import (
    CoverSpec,
    CylinderUnion,
    PartitionSpec,
    block_partition,
    symbol_partition,
    trivial_cover,
)
from symdyn.errors import ArgumentError, ConfigError
from symdyn.measures import (
    FrequencyMeasure,
    PeriodicMeasure,
    bernoulli,
    markov_chain,
    parry_measure,
    random_markov,
    uniform_markov,
)
from symdyn.subshifts import SFT, FullShift, Sturmian, Substitution

if TYPE_CHECKING:
    from symdyn.measures import InvariantMeasure
    from symdyn.subshifts import Subshift

_CONVERGENT = re.compile(r"^\s*(\d+)\s*/\s*(\d+)\s*$")


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class SystemConfig(_Strict):
    """A finitely presented subshift."""

    type: Literal["full", "sft", "substitution", "sturmian"]
    alphabet: int = Field(2, ge=2)
    forbidden: list[str] = Field(default_factory=list)
    rules: dict[str, str] = Field(default_factory=dict)
    convergent: Optional[str] = None
    intercept: str = "0"
    name: Optional[str] = None

    @model_validator(mode="after")
    def _fields_fit_type(self) -> SystemConfig:
        if self.forbidden and self.type != "sft":
            msg = f"forbidden words apply to type sft, not {self.type}"
            raise ValueError(msg)
        if self.type == "substitution":
            if sorted(self.rules) != [str(a) for a in range(len(self.rules))]:
                msg = "substitution rules must be keyed 0, 1, ..., k - 1"
                raise ValueError(msg)
        elif self.rules:
            msg = f"rules apply to type substitution, not {self.type}"
            raise ValueError(msg)
        if self.type == "sturmian":
            if self.convergent is None or not _CONVERGENT.match(self.convergent):
                msg = "a sturmian system needs a convergent 'p/q'"
                raise ValueError(msg)
        elif self.convergent is not None:
            msg = f"convergent applies to type sturmian, not {self.type}"
            raise ValueError(msg)
        return self

    def build(self, caps: Caps = DEFAULT_CAPS) -> Subshift:
        """The subshift this config describes.

        :raise ArgumentError: if the system itself is invalid (no points, not
            primitive, bad convergent)
        """
        if self.type == "full":
            return FullShift(self.alphabet, caps)
        if self.type == "sft":
            return SFT(self.alphabet, self.forbidden, caps, self.name)
        if self.type == "substitution":
            rules = [self.rules[str(a)] for a in range(len(self.rules))]
            return Substitution(rules, caps, self.name)
        match = _CONVERGENT.match(self.convergent or "")
        assert match is not None
        try:
            intercept = Fraction(self.intercept)
        except ValueError as err:
            msg = f"cannot read intercept {self.intercept!r}"
            raise ConfigError(msg, "intercept") from err
        return Sturmian(int(match[1]), int(match[2]), intercept, caps, self.name)


class CoverConfig(_Strict):
    """A cover or partition anchored at 0.

    ``cylinders`` elements are lists of words at 0; ``blocks`` uses the
    admissible ``resolution``-blocks.
    """

    kind: Literal["symbols", "blocks", "trivial", "cylinders"] = "symbols"
    resolution: int = Field(1, ge=1)
    elements: list[list[str]] = Field(default_factory=list)
    labels: Optional[list[str]] = None
    partition: bool = False

    @model_validator(mode="after")
    def _elements_fit_kind(self) -> CoverConfig:
        if self.kind == "cylinders" and not self.elements:
            msg = "a cylinders cover needs elements"
            raise ValueError(msg)
        if self.kind != "cylinders" and self.elements:
            msg = f"elements apply to kind cylinders, not {self.kind}"
            raise ValueError(msg)
        return self

    def build(self, subshift: Subshift) -> CoverSpec:
        """
        :raise InvalidCoverError: if the elements do not cover subshift
        """
        if self.kind == "symbols":
            return symbol_partition(subshift)
        if self.kind == "blocks":
            return block_partition(subshift, self.resolution)
        if self.kind == "trivial":
            return trivial_cover(subshift)
        elements = [
            CylinderUnion.from_cylinders(subshift.alphabet, [(0, w) for w in words])
            for words in self.elements
        ]
        if self.partition:
            return PartitionSpec(subshift, elements, self.labels)
        return CoverSpec(subshift, elements, self.labels)


class MeasureConfig(_Strict):
    """An invariant measure on the configured system."""

    kind: Literal[
        "parry", "uniform", "random", "bernoulli", "markov", "periodic", "frequency"
    ]
    probabilities: list[str] = Field(default_factory=list)
    matrix: list[list[str]] = Field(default_factory=list)
    cycle: Optional[str] = None
    seed: int = 0
    name: str = ""

    @model_validator(mode="after")
    def _fields_fit_kind(self) -> MeasureConfig:
        if self.kind == "bernoulli" and not self.probabilities:
            msg = "a bernoulli measure needs probabilities"
            raise ValueError(msg)
        if self.kind == "markov" and not self.matrix:
            msg = "a markov measure needs a matrix"
            raise ValueError(msg)
        if self.kind == "periodic" and not self.cycle:
            msg = "a periodic measure needs a cycle"
            raise ValueError(msg)
        return self

    def build(self, subshift: Subshift) -> InvariantMeasure:
        """
        :raise ArgumentError: if the kind does not fit the system
        """
        if self.kind == "bernoulli":
            return bernoulli(self.probabilities, self.name)
        if self.kind == "markov":
            return markov_chain(self.matrix, self.name or "markov")
        if self.kind == "periodic":
            return PeriodicMeasure(self.cycle or "", subshift.alphabet, self.name)
        if self.kind == "frequency":
            if not isinstance(subshift, Substitution):
                msg = "frequency measures need a substitution system"
                raise ArgumentError(msg)
            return FrequencyMeasure(subshift)
        if not isinstance(subshift, SFT):
            msg = f"{self.kind} measures need an SFT"
            raise ArgumentError(msg)
        if self.kind == "parry":
            return parry_measure(subshift)
        if self.kind == "uniform":
            return uniform_markov(subshift, self.name)
        return random_markov(subshift, self.seed, name=self.name)


class RunConfig(_Strict):
    """A system with the cover and measure family a command works on."""

    system: SystemConfig
    cover: Optional[CoverConfig] = None
    family: list[MeasureConfig] = Field(default_factory=list)


def _field_path(loc: tuple[Union[int, str], ...]) -> str:
    return ".".join(str(x) for x in loc) or "(document)"


def parse_config(text: str) -> RunConfig:
    """Validate a JSON document as a run or a bare system.

    :raise ConfigError: on malformed JSON (with its line) or a schema failure
        (with the dotted field path)
    """
    try:
        document: Any = json.loads(text)
    except json.JSONDecodeError as err:
        msg = f"config is not valid JSON at line {err.lineno}: {err.msg}"
        raise ConfigError(msg, f"line {err.lineno}") from err
    if isinstance(document, dict) and "system" not in document:
        document = {"system": document}
    try:
        return RunConfig.model_validate(document)
    except ValidationError as err:
        first = err.errors()[0]
        field = _field_path(tuple(first["loc"]))
        msg = f"config field {field}: {first['msg']}"
        raise ConfigError(msg, field) from err


def load_config(path: str | Path) -> RunConfig:
    """Read and validate a config file.

    :raise ConfigError: if the file cannot be read or fails validation
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        msg = f"cannot read config {path}: {err.strerror}"
        raise ConfigError(msg, str(path)) from err
    return parse_config(text)


def canonical_json(config: BaseModel) -> str:
    """Stable text of a config, for digests."""
    dump = config.model_dump(mode="json")
    return json.dumps(dump, sort_keys=True, separators=(",", ":"))
