"""CSV report emission.

Every emitted file starts with a ``#`` comment line recording the SHA-256
of each input that produced it, so reports are traceable to their data.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from ..exemplars.lists import write_atomic
from .core import EmptyWindowError, accuracy
from .series import LabelSeries
from .trajectory import CohortReport, TrajectoryReport

RULE_CLASSES = ("all", "propositional", "fol")


def hash_inputs(paths: Sequence[str | Path]) -> dict[str, str]:
    digests = {}
    for path in paths:
        path = Path(path)
        digests[path.name] = hashlib.sha256(path.read_bytes()).hexdigest()
    return digests


def _write_csv(path: str | Path, header: list[str], rows: list[list], inputs: Mapping[str, str]):
    buffer = io.StringIO()
    buffer.write("# inputs: " + json.dumps(dict(sorted(inputs.items()))) + "\n")
    writer = csv.writer(buffer)
    writer.writerow(header)
    writer.writerows(rows)
    write_atomic(path, buffer.getvalue())


def _format(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


@dataclass(frozen=True)
class AccuracySummary:
    """One cohort's accuracy cells for the summary table, keyed by
    (rule class, window); SDs are optional (human rows carry them)."""

    cohort: str
    cells: dict[tuple[str, str], float]
    sds: dict[tuple[str, str], float]


def summarize_series(
    cohort: str,
    series_by_rule: Mapping[str, LabelSeries],
    kinds: Mapping[str, str],
) -> AccuracySummary:
    """Mean per-rule accuracy for each (rule class, window) cell."""
    cells = {}
    for rule_class in RULE_CLASSES:
        for window in ("overall", "last_quarter"):
            scores = []
            for rule_id, series in series_by_rule.items():
                if rule_class != "all" and kinds[rule_id] != rule_class:
                    continue
                try:
                    scores.append(accuracy(series, window))
                except EmptyWindowError:
                    continue
            if scores:
                cells[(rule_class, window)] = sum(scores) / len(scores)
    return AccuracySummary(cohort=cohort, cells=cells, sds={})


def write_summary_csv(
    path: str | Path, summaries: Sequence[AccuracySummary], inputs: Mapping[str, str]
) -> None:
    """The summary table: one row per cohort, accuracy (and optional SD)
    columns for every rule class and window."""
    header = ["cohort"]
    for rule_class in RULE_CLASSES:
        for window in ("overall", "last_quarter"):
            header.append(f"{rule_class}_{window}")
            header.append(f"{rule_class}_{window}_sd")
    rows = []
    for summary in summaries:
        row = [summary.cohort]
        for rule_class in RULE_CLASSES:
            for window in ("overall", "last_quarter"):
                key = (rule_class, window)
                row.append(_format(summary.cells.get(key)))
                row.append(_format(summary.sds.get(key)))
        rows.append(row)
    _write_csv(path, header, rows, inputs)


def write_trajectory_csv(
    path: str | Path,
    reports: Mapping[str, Sequence[TrajectoryReport]],
    inputs: Mapping[str, str],
) -> None:
    """Per-rule learning trajectories: one row per (rule, cohort, set)."""
    rows = []
    for rule_id in sorted(reports):
        for report in reports[rule_id]:
            for set_index, mean_accuracy in enumerate(report.per_set_accuracy):
                rows.append(
                    [rule_id, report.cohort, set_index, _format(mean_accuracy), _format(report.chance)]
                )
    _write_csv(
        path, ["rule_id", "cohort", "set_index", "mean_accuracy", "chance_baseline"], rows, inputs
    )


def write_delta_csv(
    path: str | Path,
    report: CohortReport,
    kinds: Mapping[str, str],
    inputs: Mapping[str, str],
) -> None:
    """Model-minus-median rows sorted by descending delta, with the cohort's
    percentile bands."""
    header = ["rule_id", "kind", "model_score", "cohort_median", "delta"]
    for q in report.percentiles:
        header.append(f"pct{q:g}")
        header.append(f"below_pct{q:g}")
    rows = []
    for row in report.rows:
        out = [
            row.rule_id,
            kinds.get(row.rule_id, ""),
            _format(row.model_score),
            _format(row.cohort_median),
            _format(row.delta),
        ]
        for band, below in zip(row.percentile_bands, row.below_band):
            out.append(_format(band))
            out.append(str(below))
        rows.append(out)
    _write_csv(path, header, rows, inputs)
