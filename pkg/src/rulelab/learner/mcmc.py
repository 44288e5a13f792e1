"""Metropolis-Hastings over derivation trees with subtree regeneration.

A proposal picks one production application uniformly at random and redraws
that subtree from the grammar's prior.  With that proposal the prior terms
cancel against the proposal density and the acceptance ratio reduces to

    likelihood(new) / likelihood(old) * n_applications(old) / n_applications(new)

Passing ``max_size`` rejects proposals whose concept exceeds the bound, so
the chain targets the same truncated posterior that exact enumeration
normalizes over.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from typing import Iterable

from ..dsl import Concept
from ..exemplars import ExemplarList
from .grammar import Derivation, Grammar, sample_derivation
from .inference import (
    HypothesisEntry,
    LearnerRun,
    NoiseParams,
    Observation,
    PosteriorState,
    SetPrediction,
    log_likelihood,
    map_rule,
    posterior_predictive,
)


def _paths(derivation: Derivation, prefix: tuple[int, ...] = ()) -> Iterable[tuple[int, ...]]:
    yield prefix
    for i, child in enumerate(derivation.children):
        yield from _paths(child, prefix + (i,))


def _subtree(derivation: Derivation, path: tuple[int, ...]) -> Derivation:
    node = derivation
    for index in path:
        node = node.children[index]
    return node


def _replace(derivation: Derivation, path: tuple[int, ...], replacement: Derivation) -> Derivation:
    if not path:
        return replacement
    head, rest = path[0], path[1:]
    children = list(derivation.children)
    children[head] = _replace(children[head], rest, replacement)
    return Derivation(derivation.production, tuple(children))


def mh_sample(
    grammar: Grammar,
    evidence: list[Observation],
    noise: NoiseParams,
    iterations: int,
    seed: int,
    max_size: int | None = None,
    burn_in: int | None = None,
) -> PosteriorState:
    """Empirical posterior over concepts from ``iterations`` MH steps.

    Deterministic under a fixed seed.  ``burn_in`` defaults to
    min(1000, iterations // 10); burn-in states are not tallied.
    """
    if iterations < 1:
        raise ValueError("iterations must be at least 1")
    rng = random.Random(seed)
    if burn_in is None:
        burn_in = min(1000, iterations // 10)

    def fresh_state() -> Derivation:
        while True:
            derivation = sample_derivation(grammar, rng)
            if max_size is None or derivation.concept_size() <= max_size:
                return derivation

    likelihood_cache: dict[Concept, float] = {}
    prior_cache: dict[Concept, float] = {}

    def scored(derivation: Derivation) -> tuple[Concept, float]:
        concept = derivation.concept()
        if concept not in likelihood_cache:
            likelihood_cache[concept] = log_likelihood(concept, evidence, noise)
            prior_cache[concept] = derivation.log_prior(grammar)
        return concept, likelihood_cache[concept]

    current = fresh_state()
    current_concept, current_ll = scored(current)
    while current_ll == float("-inf"):
        current = fresh_state()
        current_concept, current_ll = scored(current)
    current_apps = current.n_applications()

    counts: Counter[Concept] = Counter()
    for step in range(iterations):
        paths = list(_paths(current))
        path = paths[rng.randrange(len(paths))]
        nonterminal = _subtree(current, path).production.lhs
        proposal = _replace(current, path, sample_derivation(grammar, rng, nonterminal))
        if max_size is None or proposal.concept_size() <= max_size:
            proposal_concept, proposal_ll = scored(proposal)
            proposal_apps = proposal.n_applications()
            log_accept = (
                proposal_ll - current_ll + math.log(current_apps) - math.log(proposal_apps)
            )
            if log_accept >= 0.0 or rng.random() < math.exp(log_accept):
                current = proposal
                current_concept = proposal_concept
                current_ll = proposal_ll
                current_apps = proposal_apps
        if step >= burn_in:
            counts[current_concept] += 1

    total = sum(counts.values())
    entries = tuple(
        HypothesisEntry(
            concept=concept,
            log_prior=prior_cache[concept],
            log_likelihood=likelihood_cache[concept],
            log_weight=math.log(count / total),
        )
        for concept, count in sorted(counts.items(), key=lambda item: -item[1])
    )
    # Empirical weights are already normalized; there is no meaningful
    # evidence estimate, so the normalization constant is flagged as NaN.
    return PosteriorState(entries=entries, log_z=float("nan"), vocab=grammar.vocab)


def run_mh(
    exemplar_list: ExemplarList,
    grammar: Grammar,
    noise: NoiseParams,
    iterations: int,
    seed: int,
    max_size: int | None = None,
) -> LearnerRun:
    """Replay the labeling task with a fresh MH posterior per set.

    Set ``s`` is predicted from a chain conditioned on sets 0..s-1 and
    seeded with ``seed + s``, so runs are deterministic end to end.
    """
    evidence: list[Observation] = []
    per_set = []
    for set_index, exemplar_set in enumerate(exemplar_list.sets):
        state = mh_sample(grammar, evidence, noise, iterations, seed + set_index, max_size)
        contexts = [exemplar_set.context_for(i) for i in range(len(exemplar_set.objects))]
        predictive = tuple(posterior_predictive(state, ctx, noise) for ctx in contexts)
        per_set.append(
            SetPrediction(
                set_index=set_index,
                map_concept=map_rule(state),
                p_true=predictive,
                labels=tuple(p > 0.5 for p in predictive),
            )
        )
        evidence += [(ctx, label) for ctx, label in zip(contexts, exemplar_set.labels)]
    final_state = mh_sample(
        grammar, evidence, noise, iterations, seed + len(exemplar_list.sets), max_size
    )
    return LearnerRun(
        rule_id=exemplar_list.rule_id, per_set=tuple(per_set), final_map=map_rule(final_state)
    )
