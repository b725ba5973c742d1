"""JSON configuration loading with strict schema checks."""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .model import (
    DEFAULT_ANALYSIS_FREQUENCY,
    DetectionChain,
    ModelError,
    OpoParams,
    ShgParams,
    validate,
)

BUNDLED = {"paper-defaults": "paper-defaults.json"}

_SECTIONS = {"shg": ShgParams, "opo": OpoParams, "detection": DetectionChain}
_OPTIONAL_TOP = {"analysis_frequency": DEFAULT_ANALYSIS_FREQUENCY}


class ConfigError(ModelError):
    """Configuration file missing, unreadable, or not matching the schema."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


@dataclass(frozen=True)
class Config:
    shg: ShgParams
    opo: OpoParams
    detection: DetectionChain
    analysis_frequency: float = DEFAULT_ANALYSIS_FREQUENCY

    def to_dict(self):
        return dataclasses.asdict(self)

    def digest(self):
        """sha256 of the canonical JSON form; identifies the config in reports."""
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def _is_number(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def config_from_dict(doc):
    """Build a Config from a parsed JSON document, collecting every problem."""
    problems = []
    if not isinstance(doc, dict):
        raise ConfigError(["<root>: expected a JSON object"])

    for key in doc:
        if key not in _SECTIONS and key not in _OPTIONAL_TOP:
            problems.append(f"{key}: unknown key")

    records = {}
    for name, cls in _SECTIONS.items():
        if name not in doc:
            problems.append(f"{name}: missing required key")
            continue
        section = doc[name]
        if not isinstance(section, dict):
            problems.append(f"{name}: expected an object")
            continue
        fields = {f.name: f for f in dataclasses.fields(cls)}
        for key in section:
            if key not in fields:
                problems.append(f"{name}.{key}: unknown key")
        kwargs = {}
        for key in fields:
            if key not in section:
                problems.append(f"{name}.{key}: missing required key")
            elif not _is_number(section[key]):
                problems.append(f"{name}.{key}: expected a number, got {section[key]!r}")
            else:
                kwargs[key] = float(section[key])
        if len(kwargs) == len(fields):
            record = cls(**kwargs)
            problems.extend(f"{name}.{v.field}: {v.message} (got {v.value!r})"
                            for v in validate(record))
            records[name] = record

    freq = doc.get("analysis_frequency", _OPTIONAL_TOP["analysis_frequency"])
    if not _is_number(freq) or not math.isfinite(freq) or freq < 0:
        problems.append(f"analysis_frequency: expected a number >= 0, got {freq!r}")

    if problems:
        raise ConfigError(problems)
    return Config(analysis_frequency=float(freq), **records)


def parse_config(path) -> Config:
    """Load a config file, or a bundled config by name (``paper-defaults``)."""
    p = Path(path)
    if not p.exists() and str(path) in BUNDLED:
        text = resources.files("opo_squeeze").joinpath("data", BUNDLED[str(path)]).read_text()
    else:
        try:
            text = p.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError([f"{path}: cannot read config ({exc.strerror or exc})"]) from exc
    if not text.strip():
        doc = {}
    else:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError([f"{path}: invalid JSON ({exc})"]) from exc
    return config_from_dict(doc)
