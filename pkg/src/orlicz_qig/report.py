"""
Run reports: a JSON document per CLI invocation.

Non-finite reals are written as the strings ``"inf"``, ``"-inf"`` and
``"nan"`` so that every report is strict JSON and validates against
:data:`REPORT_SCHEMA`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

from . import __version__

_REAL = {
    "anyOf": [
        {"type": "number"},
        {"type": "string", "enum": ["inf", "-inf", "nan"]},
    ]
}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "orlicz-qig run report",
    "type": "object",
    "required": ["command", "inputs", "results", "checks", "timing_ms", "version"],
    "additionalProperties": False,
    "properties": {
        "command": {"type": "string"},
        "inputs": {"type": "object"},
        "results": {"type": "object", "additionalProperties": _REAL},
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "margin", "pass"],
                "properties": {
                    "name": {"type": "string"},
                    "margin": _REAL,
                    "pass": {"type": "boolean"},
                    "tolerance": _REAL,
                    "infinite": {"type": "boolean"},
                    "criterion": {"type": "integer"},
                    "dim": {"type": "integer"},
                    "trials": {"type": "integer"},
                },
            },
        },
        "timing_ms": {"type": "number", "minimum": 0},
        "version": {"type": "string"},
    },
}


def encode_real(x: float):
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def decode_real(x) -> float:
    return float(x)


@dataclass
class Check:
    name: str
    margin: float
    passed: bool
    tolerance: float = 0.0
    criterion: int | None = None
    dim: int | None = None
    trials: int | None = None

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "margin": encode_real(self.margin),
            "pass": bool(self.passed),
            "tolerance": encode_real(self.tolerance),
            "infinite": math.isinf(self.margin),
        }
        for key in ("criterion", "dim", "trials"):
            if getattr(self, key) is not None:
                d[key] = int(getattr(self, key))
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Check":
        return cls(
            d["name"], decode_real(d["margin"]), d["pass"],
            decode_real(d.get("tolerance", 0.0)),
            d.get("criterion"), d.get("dim"), d.get("trials"),
        )


@dataclass
class RunReport:
    command: str
    inputs: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    timing_ms: float = 0.0
    version: str = __version__

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "results": {k: encode_real(v) for k, v in self.results.items()},
            "checks": [c.to_dict() for c in self.checks],
            "timing_ms": float(self.timing_ms),
            "version": self.version,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunReport":
        validate_report(d)
        return cls(
            d["command"], d["inputs"],
            {k: decode_real(v) for k, v in d["results"].items()},
            [Check.from_dict(c) for c in d["checks"]],
            d["timing_ms"], d["version"],
        )

    def to_json(self) -> str:
        d = self.to_dict()
        validate_report(d)
        return json.dumps(d, indent=1, allow_nan=False)

    def save(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n")

    @classmethod
    def load(cls, path) -> "RunReport":
        return cls.from_dict(json.loads(Path(path).read_text()))


def validate_report(d: dict) -> None:
    """Raise ``jsonschema.ValidationError`` if ``d`` is not a valid report."""
    jsonschema.validate(d, REPORT_SCHEMA)


def strip_timing(d: dict) -> dict:
    """Copy of a report dict without the wall-clock field, for determinism comparisons."""
    return {k: v for k, v in d.items() if k != "timing_ms"}


__all__ = ["Check", "RunReport", "REPORT_SCHEMA", "validate_report", "strip_timing"]
