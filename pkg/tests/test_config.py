"""Test reading systems, covers, and measure families from JSON.

:author: Shay Hill
:created: 2024-04-10
"""

import json
import math
from pathlib import Path

import pytest

from symdyn.config import canonical_json, load_config, parse_config
from symdyn.cylinders import PartitionSpec
from symdyn.entropy import sft_entropy
from symdyn.errors import ArgumentError, ConfigError, InvalidSubshiftError
from symdyn.measures import FrequencyMeasure, MarkovMeasure
from symdyn.subshifts import SFT, FullShift, Sturmian, Substitution

GOLDEN = {"type": "sft", "alphabet": 2, "forbidden": ["11"], "name": "golden"}


class TestSystems:
    def test_bare_system(self) -> None:
        config = parse_config(json.dumps(GOLDEN))
        system = config.system.build()
        assert isinstance(system, SFT)
        assert system.name == "golden"
        assert sft_entropy(system) == pytest.approx(math.log((1 + math.sqrt(5)) / 2))
        assert config.cover is None
        assert config.family == []

    def test_kinds(self) -> None:
        full = parse_config('{"type": "full", "alphabet": 3}').system.build()
        assert isinstance(full, FullShift)
        assert full.alphabet == 3
        morse = {"type": "substitution", "rules": {"0": "01", "1": "10"}}
        assert isinstance(
            parse_config(json.dumps(morse)).system.build(), Substitution
        )
        sturmian = {"type": "sturmian", "convergent": "3/5"}
        assert isinstance(
            parse_config(json.dumps(sturmian)).system.build(), Sturmian
        )

    def test_no_points(self) -> None:
        config = parse_config('{"type": "sft", "forbidden": ["0", "1"]}')
        with pytest.raises(InvalidSubshiftError):
            _ = config.system.build()


class TestRuns:
    def test_cover_and_family(self) -> None:
        document = {
            "system": GOLDEN,
            "cover": {"kind": "cylinders", "elements": [["0"], ["10"]]},
            "family": [{"kind": "parry"}, {"kind": "uniform"}, {"kind": "random"}],
        }
        config = parse_config(json.dumps(document))
        system = config.system.build()
        assert len(config.cover.build(system).elements) == 2  # type: ignore[union-attr]
        measures = [m.build(system) for m in config.family]
        assert all(isinstance(m, MarkovMeasure) for m in measures)

    def test_partition_flag(self) -> None:
        cover = {"kind": "cylinders", "elements": [["0"], ["1"]], "partition": True}
        document = {"system": GOLDEN, "cover": cover}
        config = parse_config(json.dumps(document))
        assert config.cover is not None
        assert isinstance(config.cover.build(config.system.build()), PartitionSpec)

    def test_frequency_needs_substitution(self) -> None:
        document = {"system": GOLDEN, "family": [{"kind": "frequency"}]}
        config = parse_config(json.dumps(document))
        with pytest.raises(ArgumentError):
            _ = config.family[0].build(config.system.build())

    def test_frequency(self) -> None:
        morse = {"type": "substitution", "rules": {"0": "01", "1": "10"}}
        document = {"system": morse, "family": [{"kind": "frequency"}]}
        config = parse_config(json.dumps(document))
        measure = config.family[0].build(config.system.build())
        assert isinstance(measure, FrequencyMeasure)


class TestFailures:
    def test_unknown_field(self) -> None:
        with pytest.raises(ConfigError) as err:
            _ = parse_config('{"type": "sft", "colour": "red"}')
        assert err.value.field == "system.colour"

    def test_bad_json(self) -> None:
        with pytest.raises(ConfigError) as err:
            _ = parse_config('{"type": "sft",\n')
        assert "not valid JSON" in err.value.args[0]
        assert err.value.field.startswith("line")

    @pytest.mark.parametrize(
        ("document", "message"),
        [
            ({"type": "full", "forbidden": ["11"]}, "forbidden words apply"),
            ({"type": "substitution", "rules": {"1": "10"}}, "keyed 0, 1"),
            ({"type": "sturmian"}, "convergent 'p/q'"),
            ({"type": "full", "convergent": "1/2"}, "convergent applies"),
            ({"type": "full", "alphabet": 1}, "greater than or equal to 2"),
        ],
    )
    def test_system_schema(self, document: dict[str, object], message: str) -> None:
        with pytest.raises(ConfigError) as err:
            _ = parse_config(json.dumps(document))
        assert message in err.value.args[0]
        assert err.value.field.startswith("system")

    def test_cover_schema(self) -> None:
        document = {"system": GOLDEN, "cover": {"kind": "cylinders"}}
        with pytest.raises(ConfigError) as err:
            _ = parse_config(json.dumps(document))
        assert "needs elements" in err.value.args[0]

    def test_family_schema(self) -> None:
        document = {"system": GOLDEN, "family": [{"kind": "bernoulli"}]}
        with pytest.raises(ConfigError) as err:
            _ = parse_config(json.dumps(document))
        assert err.value.field.startswith("family.0")

    def test_missing_file(self, tmp_path: Path) -> None:
        with pytest.raises(ConfigError) as err:
            _ = load_config(tmp_path / "absent.json")
        assert "cannot read config" in err.value.args[0]


class TestCanonical:
    def test_key_order(self, tmp_path: Path) -> None:
        path = tmp_path / "golden.json"
        _ = path.write_text(json.dumps(dict(reversed(GOLDEN.items()))))
        assert canonical_json(load_config(path)) == canonical_json(
            parse_config(json.dumps(GOLDEN))
        )

    def test_defaults_are_explicit(self) -> None:
        bare = canonical_json(parse_config('{"type": "full"}'))
        spelled = canonical_json(parse_config('{"type": "full", "alphabet": 2}'))
        assert bare == spelled
