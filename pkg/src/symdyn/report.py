"""Deterministic JSON run reports and CSV tables.

:author: Shay Hill
:created: 2024-03-29
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import metadata
from pathlib import Path
from typing import Any, Iterable, Mapping

import mpmath
import numpy as np
import pydantic
import scipy
import sympy

from symdyn.caps import Caps


def _plain(value: Any) -> Any:
    """JSON fallback: exact fractions as text, numpy scalars as Python numbers."""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (set, frozenset)):
        return sorted(value)
    if isinstance(value, tuple):
        return list(value)
    msg = f"cannot write {type(value).__name__} to a report"
    raise TypeError(msg)


def canonical_dumps(payload: Any, indent: int | None = 2) -> str:
    """JSON with sorted keys."""
    return json.dumps(payload, sort_keys=True, indent=indent, default=_plain)


def digest(text: str) -> str:
    """sha256 of a config's canonical text."""
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def versions() -> dict[str, str]:
    """Versions of this package and the numerical stack."""
    try:
        own = metadata.version("symdyn")
    except metadata.PackageNotFoundError:
        own = "unknown"
    return {
        "symdyn": own,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "sympy": sympy.__version__,
        "mpmath": mpmath.__version__,
        "pydantic": pydantic.VERSION,
    }


@dataclass
class RunReport:
    """Everything one command computed, with what it computed it under.

    ``tolerances`` maps each numeric claim to its tolerance or "exact".
    """

    command: str
    config_digest: str
    parameters: dict[str, Any]
    results: dict[str, Any]
    tolerances: dict[str, Any]
    caps: Caps
    started: float = field(default_factory=time.time)
    wall_time: float | None = None

    def finish(self) -> RunReport:
        self.wall_time = time.time() - self.started
        return self

    def as_dict(self, timestamp: bool = True) -> dict[str, Any]:
        """Report fields; without timestamp the dict depends on inputs alone."""
        payload: dict[str, Any] = {
            "command": self.command,
            "config_digest": self.config_digest,
            "parameters": self.parameters,
            "results": self.results,
            "tolerances": self.tolerances,
            "caps": self.caps.as_dict(),
            "versions": versions(),
        }
        if timestamp:
            payload["timestamp"] = time.strftime(
                "%Y-%m-%dT%H:%M:%SZ", time.gmtime(self.started)
            )
            payload["wall_time"] = self.wall_time
        return payload

    def to_json(self, timestamp: bool = True) -> str:
        return canonical_dumps(self.as_dict(timestamp))


def write_text(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def write_csv(path: str | Path, rows: Iterable[Mapping[str, Any]]) -> None:
    """One CSV table; columns from the first row."""
    rows = list(rows)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as stream:
        if not rows:
            return
        writer = csv.DictWriter(stream, fieldnames=list(rows[0]))
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _cell(v) for k, v in row.items()})


def _cell(value: Any) -> Any:
    if isinstance(value, (Fraction, np.generic)):
        return _plain(value)
    return value
