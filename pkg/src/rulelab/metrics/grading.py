"""Grading elicited rules: likelihood, consistency, and match rate.

*Likelihood* of a rule is the fraction of already-seen gold labels it
accounts for.  *Consistency* is the fraction of a session's emitted labels
that agree with the rule reported alongside them.  *Match rate* is the
fraction of rules whose final reported rule reaches likelihood exactly 1.0
over the full list; the stricter bounded-universe equivalence rate is
reported next to it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from ..dsl import Concept, Context, FeatureVocab, equivalent, evaluate
from ..exemplars import ExemplarList
from ..learner.inference import Observation


def rule_likelihood_counts(concept: Concept, evidence: Sequence[Observation]) -> tuple[int, int]:
    """(correct, total) over the evidence; exact integers so that a
    likelihood of exactly 1.0 is decidable without float comparison."""
    if not evidence:
        raise ValueError("evidence must be non-empty")
    correct = sum(evaluate(concept, ctx) == label for ctx, label in evidence)
    return correct, len(evidence)


def rule_likelihood(concept: Concept, evidence: Sequence[Observation]) -> float:
    correct, total = rule_likelihood_counts(concept, evidence)
    return correct / total


@dataclass(frozen=True)
class SetReport:
    """One set's reported rule with the labels emitted while it was held.

    ``labels`` pairs each labeled object's context with the emitted label;
    excluded objects carry None and do not count toward consistency.
    """

    concept: Concept | None
    labels: tuple[tuple[Context, bool | None], ...]


def consistency(session: Sequence[SetReport]) -> float:
    """Fraction of labeled objects agreeing with the concurrently reported
    rule.  Sets without a reported rule are skipped."""
    agreed = total = 0
    for report in session:
        if report.concept is None:
            continue
        for ctx, label in report.labels:
            if label is None:
                continue
            total += 1
            agreed += evaluate(report.concept, ctx) == label
    if total == 0:
        raise ValueError("no labeled objects under a reported rule")
    return agreed / total


@dataclass(frozen=True)
class RuleVerdict:
    rule_id: str
    likelihood: Fraction | None  # None when the final rule did not parse
    matches: bool
    equivalent: bool


@dataclass(frozen=True)
class MatchReport:
    verdicts: tuple[RuleVerdict, ...]

    @property
    def match_rate(self) -> float:
        return sum(v.matches for v in self.verdicts) / len(self.verdicts)

    @property
    def equivalence_rate(self) -> float:
        return sum(v.equivalent for v in self.verdicts) / len(self.verdicts)


def match_rate(
    final_concepts: Mapping[str, Concept | None],
    lists: Mapping[str, ExemplarList],
    vocab: FeatureVocab,
    max_set_size: int = 5,
) -> MatchReport:
    """Grade one final concept per rule against its full exemplar list.

    A missing or unparsed final concept (None) counts as a non-match.
    """
    if set(final_concepts) != set(lists):
        raise ValueError("need exactly one final concept per rule")
    verdicts = []
    for rule_id in sorted(lists):
        exemplar_list = lists[rule_id]
        concept = final_concepts[rule_id]
        if concept is None:
            verdicts.append(RuleVerdict(rule_id, None, False, False))
            continue
        evidence = [
            (ctx, label) for _s, _o, ctx, label in exemplar_list.iter_items()
        ]
        correct, total = rule_likelihood_counts(concept, evidence)
        verdicts.append(
            RuleVerdict(
                rule_id=rule_id,
                likelihood=Fraction(correct, total),
                matches=correct == total,
                equivalent=equivalent(
                    concept, exemplar_list.concept, vocab, max_set_size=max_set_size
                ),
            )
        )
    return MatchReport(verdicts=tuple(verdicts))
