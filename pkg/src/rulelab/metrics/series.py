"""Per-object label records: the common currency of all metrics."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..exemplars.lists import write_atomic


@dataclass(frozen=True)
class ObjectRecord:
    """One labeled (or excluded) object in presentation order.

    ``model`` is None when the object was excluded; ``p_true`` and
    ``human`` are optional per-source probabilities.
    """

    set_index: int
    object_index: int
    gold: bool
    model: bool | None = None
    p_true: float | None = None
    human: float | None = None

    def __post_init__(self):
        for name in ("p_true", "human"):
            value = getattr(self, name)
            if value is not None and not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")


@dataclass
class LabelSeries:
    rule_id: str
    records: list[ObjectRecord] = field(default_factory=list)

    def __post_init__(self):
        order = [(r.set_index, r.object_index) for r in self.records]
        if order != sorted(order):
            raise ValueError("records must be in presentation order")
        if len(set(order)) != len(order):
            raise ValueError("duplicate (set, object) positions")

    def __len__(self) -> int:
        return len(self.records)


def save_series(series: LabelSeries, path: str | Path) -> None:
    doc = {
        "rule_id": series.rule_id,
        "records": [
            {
                "set_index": r.set_index,
                "object_index": r.object_index,
                "gold": r.gold,
                "model": r.model,
                "p_true": r.p_true,
                "human": r.human,
            }
            for r in series.records
        ],
    }
    write_atomic(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def load_series(path: str | Path) -> LabelSeries:
    doc = json.loads(Path(path).read_text())
    records = [
        ObjectRecord(
            set_index=r["set_index"],
            object_index=r["object_index"],
            gold=r["gold"],
            model=r["model"],
            p_true=r["p_true"],
            human=r["human"],
        )
        for r in doc["records"]
    ]
    return LabelSeries(rule_id=doc["rule_id"], records=records)
