"""Tables mapping detection patterns to probabilities or counts.

A pattern is the set of channels that fired, keyed as a tuple of
channel labels in canonical order (idlers before signals, each sorted
by channel number).  The empty tuple is the no-click pattern.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

__all__ = ["PatternKey", "OutcomeTable", "pattern_key", "pattern_string"]

PatternKey = tuple[str, ...]


def _label_sort_key(label: str) -> tuple[str, int]:
    kind, num = label[0], label[1:]
    if kind not in ("i", "s") or not num.isdigit():
        raise ValueError(f"malformed channel label {label!r}")
    return (kind, int(num))


def pattern_key(channels: Iterable[str]) -> PatternKey:
    """Canonical key for a set of channel labels."""
    labels = list(channels)
    if len(set(labels)) != len(labels):
        raise ValueError(f"duplicate channels in pattern {labels!r}")
    return tuple(sorted(labels, key=_label_sort_key))


def pattern_string(key: PatternKey) -> str:
    return "&".join(key) if key else "none"


def _key_from_string(text: str) -> PatternKey:
    if text == "none":
        return ()
    return pattern_key(text.split("&"))


@dataclass
class OutcomeTable:
    """Pattern -> value map with optional provenance metadata."""

    values: dict[PatternKey, float]
    meta: dict[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.values = {pattern_key(k): v for k, v in self.values.items()}

    def __getitem__(self, key: Iterable[str]) -> float:
        return self.values[pattern_key(key)]

    def get(self, key: Iterable[str], default: float = 0.0) -> float:
        return self.values.get(pattern_key(key), default)

    def total(self) -> float:
        return float(sum(self.values.values()))

    def scaled(self, factor: float) -> "OutcomeTable":
        return OutcomeTable({k: v * factor for k, v in self.values.items()}, dict(self.meta))

    def sorted_items(self) -> list[tuple[PatternKey, float]]:
        return sorted(self.values.items())

    def to_json_text(self, meta: Mapping[str, object] | None = None) -> str:
        merged = dict(self.meta)
        if meta:
            merged.update(meta)

        def clean(v: float):
            # inf is a legitimate sentinel but not valid JSON
            if isinstance(v, float) and not math.isfinite(v):
                return repr(v)
            return v

        doc = {
            "meta": merged,
            "values": {pattern_string(k): clean(v) for k, v in self.sorted_items()},
        }
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"

    def to_csv_text(self, meta: Mapping[str, object] | None = None) -> str:
        merged = dict(self.meta)
        if meta:
            merged.update(meta)
        lines = [f"# {k}={merged[k]}" for k in sorted(merged)]
        lines.append("pattern,value")
        for key, value in self.sorted_items():
            lines.append(f"{pattern_string(key)},{value!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_json_text(cls, text: str) -> "OutcomeTable":
        doc = json.loads(text)
        values = {_key_from_string(k): v for k, v in doc["values"].items()}
        return cls(values=values, meta=dict(doc.get("meta", {})))
