"""Posterior inference over grammar-defined hypothesis spaces.

The noise model has two parameters: with probability ``alpha`` an observed
label follows the hypothesis; otherwise it is drawn from a baseline that
emits True with probability ``beta``.  A single observation (ctx, label)
therefore contributes the likelihood factor

    alpha * [hypothesis(ctx) == label] + (1 - alpha) * (beta if label else 1 - beta)

Exact inference enumerates every concept the grammar derives up to a node
budget; :mod:`rulelab.learner.mcmc` provides the sampling engine validated
against this one.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ..dsl import Concept, Context, evaluate, size as concept_size
from ..dsl.sexpr import print_concept
from ..exemplars import ExemplarList
from .grammar import Grammar, GrammarError, substitute


class HypothesisBudgetError(GrammarError):
    """Enumeration would produce more hypotheses than the caller allows."""


class EmptyStateError(ValueError):
    pass


class DegeneratePosteriorError(ValueError):
    """Every hypothesis has zero posterior mass (alpha = 1 with evidence no
    hypothesis explains)."""


@dataclass(frozen=True)
class NoiseParams:
    alpha: float
    beta: float

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must lie in [0, 1], got {self.beta}")


Observation = tuple[Context, bool]


def evidence_from_list(exemplar_list: ExemplarList, upto_set: int | None = None) -> list[Observation]:
    """Flatten a list's labeled objects (optionally only sets before
    ``upto_set``) into presentation-ordered evidence."""
    out = []
    for set_index, _object_index, ctx, label in exemplar_list.iter_items():
        if upto_set is not None and set_index >= upto_set:
            break
        out.append((ctx, label))
    return out


def _log(x: float) -> float:
    return math.log(x) if x > 0.0 else float("-inf")


def observation_log_factor(agrees: bool, label: bool, noise: NoiseParams) -> float:
    base = noise.beta if label else 1.0 - noise.beta
    return _log(noise.alpha * agrees + (1.0 - noise.alpha) * base)


def log_likelihood(hypothesis: Concept, evidence: Iterable[Observation], noise: NoiseParams) -> float:
    """Sum of per-observation log factors; -inf is a legal result."""
    total = 0.0
    for ctx, label in evidence:
        total += observation_log_factor(evaluate(hypothesis, ctx) == label, label, noise)
    return total


def logsumexp(values: Sequence[float]) -> float:
    peak = max(values, default=float("-inf"))
    if peak == float("-inf"):
        return float("-inf")
    return peak + math.log(sum(math.exp(v - peak) for v in values))


def enumerate_hypotheses(
    grammar: Grammar, max_size: int, max_hypotheses: int = 200_000
) -> list[tuple[Concept, float]]:
    """All concepts the grammar derives with node count <= ``max_size``.

    Each concept appears once; when distinct derivations produce the same
    concept their probabilities are summed, so the returned log-priors
    account for the grammar's full mass on each concept (and total at most
    one).  Results are sorted by (size, printed form) for determinism.
    """
    if max_size < 1:
        raise GrammarError("max_size must be at least 1")

    memo: dict[tuple[str, int], dict[Concept, float]] = {}

    def exact(nonterminal: str, target_size: int) -> dict[Concept, float]:
        key = (nonterminal, target_size)
        if key in memo:
            return memo[key]
        cell: dict[Concept, float] = {}
        for production in grammar.productions_for(nonterminal):
            skeleton = production.skeleton_size
            holes = production.holes
            remaining = target_size - skeleton
            if remaining < 0 or (not holes and remaining != 0):
                continue
            log_p = grammar.log_probability(production)
            if not holes:
                _accumulate(cell, production.template, log_p)
                continue
            for combo in _size_splits(remaining, [grammar.min_size(h) for h, _d in holes]):
                _fill(cell, production, holes, combo, log_p)
        memo[key] = cell
        return cell

    def _fill(cell, production, holes, sizes, log_p):
        child_cells = [exact(holes[i][0], sizes[i]) for i in range(len(holes))]
        if any(not c for c in child_cells):
            return
        def rec(i, fills, acc):
            if i == len(child_cells):
                _accumulate(cell, substitute(production.template, fills), acc)
                return
            for concept, lp in child_cells[i].items():
                rec(i + 1, fills + [concept], acc + lp)
        rec(0, [], log_p)

    def _accumulate(cell, concept, log_p):
        if concept in cell:
            cell[concept] = float(np.logaddexp(cell[concept], log_p))
        else:
            cell[concept] = log_p

    merged: dict[Concept, float] = {}
    for target_size in range(1, max_size + 1):
        for concept, log_p in exact(grammar.start, target_size).items():
            if concept in merged:
                merged[concept] = float(np.logaddexp(merged[concept], log_p))
            else:
                merged[concept] = log_p
        if len(merged) > max_hypotheses:
            raise HypothesisBudgetError(
                f"more than {max_hypotheses} hypotheses at size {target_size}"
            )
    return sorted(
        merged.items(),
        key=lambda item: (concept_size(item[0]), print_concept(item[0], grammar.vocab)),
    )


def _size_splits(total: int, minimums: list[int]):
    """Yield tuples of child sizes >= per-child minimum summing to ``total``."""
    if not minimums:
        if total == 0:
            yield ()
        return
    first_min = minimums[0]
    rest_min = sum(minimums[1:])
    for first in range(first_min, total - rest_min + 1):
        for rest in _size_splits(total - first, minimums[1:]):
            yield (first,) + rest


@dataclass(frozen=True)
class HypothesisEntry:
    concept: Concept
    log_prior: float
    log_likelihood: float
    log_weight: float


@dataclass(frozen=True)
class PosteriorState:
    """A weighted hypothesis set; weights are normalized over its support."""

    entries: tuple[HypothesisEntry, ...]
    log_z: float
    vocab: object  # FeatureVocab; kept loose to avoid an import cycle

    @classmethod
    def from_hypotheses(
        cls, hypotheses: Sequence[tuple[Concept, float]], vocab
    ) -> "PosteriorState":
        if not hypotheses:
            raise EmptyStateError("no hypotheses")
        log_z = logsumexp([lp for _c, lp in hypotheses])
        entries = tuple(
            HypothesisEntry(concept, lp, 0.0, lp - log_z) for concept, lp in hypotheses
        )
        return cls(entries=entries, log_z=log_z, vocab=vocab)

    def update(self, ctx: Context, label: bool, noise: NoiseParams) -> "PosteriorState":
        """Condition on one labeled object; returns a new state."""
        scored = [
            (
                entry,
                entry.log_likelihood
                + observation_log_factor(evaluate(entry.concept, ctx) == label, label, noise),
            )
            for entry in self.entries
        ]
        return self._renormalized(scored)

    def update_batch(self, evidence: Iterable[Observation], noise: NoiseParams) -> "PosteriorState":
        state = self
        for ctx, label in evidence:
            state = state.update(ctx, label, noise)
        return state

    def _renormalized(self, scored) -> "PosteriorState":
        log_z = logsumexp([entry.log_prior + ll for entry, ll in scored])
        if log_z == float("-inf"):
            raise DegeneratePosteriorError("all hypotheses have zero posterior mass")
        entries = tuple(
            HypothesisEntry(entry.concept, entry.log_prior, ll, entry.log_prior + ll - log_z)
            for entry, ll in scored
        )
        return PosteriorState(entries=entries, log_z=log_z, vocab=self.vocab)

    def weight_sum(self) -> float:
        return sum(math.exp(entry.log_weight) for entry in self.entries)


def posterior_predictive(state: PosteriorState, ctx: Context, noise: NoiseParams) -> float:
    """Probability of the True label for ``ctx`` under the mixture."""
    rule_mass = sum(
        math.exp(entry.log_weight) for entry in state.entries if evaluate(entry.concept, ctx)
    )
    return noise.alpha * rule_mass + (1.0 - noise.alpha) * noise.beta


def classify(state: PosteriorState, ctx: Context, noise: NoiseParams) -> bool:
    """True iff the posterior predictive exceeds 0.5; an exact 0.5 is False."""
    return posterior_predictive(state, ctx, noise) > 0.5


def map_rule(state: PosteriorState) -> Concept:
    """Highest-posterior hypothesis; ties break toward smaller, then
    lexicographically earlier printed concepts."""
    if not state.entries:
        raise EmptyStateError("empty posterior state")
    best = max(entry.log_weight for entry in state.entries)
    candidates = [entry.concept for entry in state.entries if entry.log_weight == best]
    return min(candidates, key=lambda c: (concept_size(c), print_concept(c, state.vocab)))


@dataclass(frozen=True)
class SetPrediction:
    set_index: int
    map_concept: Concept
    p_true: tuple[float, ...]
    labels: tuple[bool, ...]


@dataclass(frozen=True)
class LearnerRun:
    rule_id: str
    per_set: tuple[SetPrediction, ...]
    final_map: Concept

    def predictive_flat(self) -> list[float]:
        return [p for s in self.per_set for p in s.p_true]

    def labels_flat(self) -> list[bool]:
        return [lab for s in self.per_set for lab in s.labels]


@dataclass(frozen=True)
class EvalMatrix:
    """Cached hypothesis-by-object evaluations for one exemplar list."""

    log_priors: np.ndarray  # (n_hyps,)
    agree_true: np.ndarray  # (n_hyps, n_objects) bool: hypothesis says True
    gold: np.ndarray  # (n_objects,) bool
    offsets: list[int]  # start object index per set, plus final total


def build_eval_matrix(
    hypotheses: Sequence[tuple[Concept, float]], exemplar_list: ExemplarList
) -> EvalMatrix:
    contexts = []
    gold = []
    offsets = [0]
    for exemplar_set in exemplar_list.sets:
        for i, label in enumerate(exemplar_set.labels):
            contexts.append(exemplar_set.context_for(i))
            gold.append(label)
        offsets.append(len(contexts))
    agree_true = np.array(
        [[evaluate(concept, ctx) for ctx in contexts] for concept, _lp in hypotheses],
        dtype=bool,
    )
    log_priors = np.array([lp for _c, lp in hypotheses], dtype=float)
    return EvalMatrix(log_priors, agree_true, np.array(gold, dtype=bool), offsets)


def _cumulative_log_likelihood(matrix: EvalMatrix, noise: NoiseParams) -> np.ndarray:
    """(n_hyps, n_objects + 1): column j holds the log-likelihood of the
    first j objects."""
    base = np.where(matrix.gold, noise.beta, 1.0 - noise.beta)
    agree = matrix.agree_true == matrix.gold
    with np.errstate(divide="ignore"):
        factors = np.log(noise.alpha * agree + (1.0 - noise.alpha) * base)
    n_hyps = factors.shape[0]
    return np.concatenate([np.zeros((n_hyps, 1)), np.cumsum(factors, axis=1)], axis=1)


def run_enumerative(
    exemplar_list: ExemplarList,
    grammar: Grammar,
    noise: NoiseParams,
    max_size: int,
    max_hypotheses: int = 200_000,
    trace_path: str | Path | None = None,
) -> LearnerRun:
    """Replay the labeling task with exact posterior inference.

    Each set is predicted from the posterior conditioned on all previous
    sets' gold labels, then the posterior absorbs the set.  When
    ``trace_path`` is given, per-timestep hypothesis scores are written as
    CSV (set_index, concept, log_prior, log_likelihood, log_posterior).
    """
    hypotheses = enumerate_hypotheses(grammar, max_size, max_hypotheses)
    matrix = build_eval_matrix(hypotheses, exemplar_list)
    cumulative = _cumulative_log_likelihood(matrix, noise)
    concepts = [c for c, _lp in hypotheses]
    sizes = [concept_size(c) for c in concepts]
    printed = [print_concept(c, grammar.vocab) for c in concepts]

    trace_rows = []
    per_set = []
    n_sets = len(exemplar_list.sets)
    for set_index in range(n_sets + 1):
        start = matrix.offsets[min(set_index, n_sets)]
        log_post_unnorm = matrix.log_priors + cumulative[:, start]
        peak = float(np.max(log_post_unnorm))
        if peak == float("-inf"):
            raise DegeneratePosteriorError(
                f"rule {exemplar_list.rule_id!r}: no hypothesis explains the evidence"
            )
        log_z = peak + math.log(float(np.sum(np.exp(log_post_unnorm - peak))))
        weights = np.exp(log_post_unnorm - log_z)
        map_index = min(
            (i for i in range(len(concepts)) if log_post_unnorm[i] == peak),
            key=lambda i: (sizes[i], printed[i]),
        )
        if trace_path is not None:
            for i in range(len(concepts)):
                trace_rows.append(
                    (set_index, printed[i], matrix.log_priors[i], cumulative[i, start],
                     log_post_unnorm[i] - log_z)
                )
        if set_index == n_sets:
            final_map = concepts[map_index]
            break
        end = matrix.offsets[set_index + 1]
        rule_mass = weights @ matrix.agree_true[:, start:end]
        predictive = noise.alpha * rule_mass + (1.0 - noise.alpha) * noise.beta
        per_set.append(
            SetPrediction(
                set_index=set_index,
                map_concept=concepts[map_index],
                p_true=tuple(float(p) for p in predictive),
                labels=tuple(bool(p > 0.5) for p in predictive),
            )
        )

    if trace_path is not None:
        with open(trace_path, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["set_index", "concept", "log_prior", "log_likelihood", "log_posterior"])
            for row in trace_rows:
                writer.writerow([row[0], row[1], f"{row[2]:.12g}", f"{row[3]:.12g}", f"{row[4]:.12g}"])
    return LearnerRun(rule_id=exemplar_list.rule_id, per_set=tuple(per_set), final_map=final_map)
