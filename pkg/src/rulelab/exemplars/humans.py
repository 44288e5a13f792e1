"""Human response ingest, subject preprocessing, and baseline statistics.

The subject filter mirrors the standard two-stage preprocessing for this
task: drop subjects who completed fewer than five sets, then drop subjects
whose accuracy falls outside two standard deviations of the per-rule mean,
with mean and SD computed once over the post-first-filter pool (a single
pass, never iterated).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

from .lists import ExemplarList

MIN_SETS = 5
SD_LIMIT = 2.0


class EmptyPoolError(ValueError):
    """Every subject was excluded."""


@dataclass(frozen=True)
class SubjectRecord:
    """One participant's responses to one rule's exemplar list.

    ``responses`` maps (set_index, object_index) to the given label;
    objects the subject never reached are simply absent.
    """

    subject_id: str
    rule_id: str
    responses: dict[tuple[int, int], bool]
    sets_completed: int

    def accuracy(self, gold: ExemplarList) -> float:
        correct = total = 0
        for set_index, object_index, _ctx, label in gold.iter_items():
            response = self.responses.get((set_index, object_index))
            if response is None:
                continue
            total += 1
            correct += response == label
        if total == 0:
            raise ValueError(f"subject {self.subject_id} has no responses")
        return correct / total


@dataclass(frozen=True)
class Exclusion:
    subject_id: str
    reason: str  # "min-sets" | "outlier"
    detail: str = ""


@dataclass
class FilterReport:
    exclusions: list[Exclusion] = field(default_factory=list)
    pool_mean: float | None = None
    pool_sd: float | None = None


@dataclass
class HumanResponseTable:
    """Per-object response counts for a rule's kept subjects."""

    rule_id: str
    n_true: dict[tuple[int, int], int]
    n_total: dict[tuple[int, int], int]

    def proportion(self, set_index: int, object_index: int) -> float | None:
        total = self.n_total.get((set_index, object_index), 0)
        if total == 0:
            return None
        return self.n_true.get((set_index, object_index), 0) / total

    def missing(self) -> list[tuple[int, int]]:
        return sorted(key for key, total in self.n_total.items() if total == 0)


def filter_subjects(
    records: list[SubjectRecord], gold: ExemplarList
) -> tuple[list[SubjectRecord], FilterReport]:
    """Apply the two-stage subject filter for one rule.

    Raises :class:`EmptyPoolError` if no subject survives either stage.
    """
    report = FilterReport()
    pool = []
    for record in records:
        if record.rule_id != gold.rule_id:
            raise ValueError(
                f"subject {record.subject_id} is for rule {record.rule_id!r}, "
                f"not {gold.rule_id!r}"
            )
        if record.sets_completed < MIN_SETS:
            report.exclusions.append(
                Exclusion(record.subject_id, "min-sets", f"completed {record.sets_completed} sets")
            )
        else:
            pool.append(record)
    if not pool:
        raise EmptyPoolError(f"no subjects left for rule {gold.rule_id!r} after the set filter")

    accuracies = [record.accuracy(gold) for record in pool]
    mean = sum(accuracies) / len(accuracies)
    sd = math.sqrt(sum((a - mean) ** 2 for a in accuracies) / len(accuracies))
    report.pool_mean = mean
    report.pool_sd = sd

    kept = []
    for record, accuracy in zip(pool, accuracies):
        if abs(accuracy - mean) > SD_LIMIT * sd:
            report.exclusions.append(
                Exclusion(
                    record.subject_id,
                    "outlier",
                    f"accuracy {accuracy:.4f} vs pool {mean:.4f} +/- {SD_LIMIT}*{sd:.4f}",
                )
            )
        else:
            kept.append(record)
    if not kept:
        raise EmptyPoolError(f"no subjects left for rule {gold.rule_id!r} after the SD filter")
    return kept, report


def human_proportions(kept: list[SubjectRecord], gold: ExemplarList) -> HumanResponseTable:
    """Per-object True counts over subjects with a response at that object."""
    if not kept:
        raise EmptyPoolError("no kept subjects")
    n_true: dict[tuple[int, int], int] = {}
    n_total: dict[tuple[int, int], int] = {}
    for set_index, object_index, _ctx, _label in gold.iter_items():
        key = (set_index, object_index)
        n_true[key] = 0
        n_total[key] = 0
        for record in kept:
            response = record.responses.get(key)
            if response is None:
                continue
            n_total[key] += 1
            n_true[key] += response
    return HumanResponseTable(rule_id=gold.rule_id, n_true=n_true, n_total=n_total)


def propagated_baseline(per_rule_stats: list[tuple[float, float]]) -> tuple[float, float]:
    """Grand mean and propagated SD of per-rule (mean, SD) accuracy pairs.

    The SD propagates as for a mean of independent estimates:
    sqrt(sum of variances) / n.
    """
    if not per_rule_stats:
        raise ValueError("need at least one rule")
    n = len(per_rule_stats)
    grand_mean = sum(mean for mean, _sd in per_rule_stats) / n
    propagated_sd = math.sqrt(sum(sd * sd for _mean, sd in per_rule_stats)) / n
    return grand_mean, propagated_sd


def _parse_response(text: str) -> bool:
    word = text.strip().casefold()
    if word == "true":
        return True
    if word == "false":
        return False
    raise ValueError(f"response must be a True/False variant, got {text!r}")


def read_subject_csv(path: str | Path) -> list[SubjectRecord]:
    """Read human responses from CSV with columns
    subject_id, rule_id, set_index, object_index, response."""
    grouped: dict[tuple[str, str], dict[tuple[int, int], bool]] = {}
    with open(path, newline="") as handle:
        for row in csv.DictReader(handle):
            key = (row["subject_id"], row["rule_id"])
            responses = grouped.setdefault(key, {})
            responses[(int(row["set_index"]), int(row["object_index"]))] = _parse_response(
                row["response"]
            )
    records = []
    for (subject_id, rule_id), responses in grouped.items():
        sets_completed = len({set_index for set_index, _ in responses})
        records.append(SubjectRecord(subject_id, rule_id, responses, sets_completed))
    records.sort(key=lambda r: (r.rule_id, r.subject_id))
    return records


def write_subject_csv(records: list[SubjectRecord], path: str | Path) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["subject_id", "rule_id", "set_index", "object_index", "response"])
        for record in records:
            for (set_index, object_index), response in sorted(record.responses.items()):
                writer.writerow(
                    [record.subject_id, record.rule_id, set_index, object_index, response]
                )
