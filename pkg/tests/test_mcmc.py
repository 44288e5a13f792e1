"""MH sampling validated against exact enumeration."""

import math

from rulelab.catalog import DEFAULT_VOCAB as V
from rulelab.dsl import parse_concept
from rulelab.exemplars import generate_list
from rulelab.learner import (
    NoiseParams,
    PosteriorState,
    default_grammar,
    enumerate_hypotheses,
    evidence_from_list,
    grammar_from_pairs,
    mh_sample,
    run_mh,
)


def tv_distance(state_a: PosteriorState, state_b: PosteriorState) -> float:
    mass_a = {e.concept: math.exp(e.log_weight) for e in state_a.entries}
    mass_b = {e.concept: math.exp(e.log_weight) for e in state_b.entries}
    support = set(mass_a) | set(mass_b)
    return 0.5 * sum(abs(mass_a.get(c, 0.0) - mass_b.get(c, 0.0)) for c in support)


def small_grammar():
    return grammar_from_pairs(
        "S",
        [
            ("S", "(is-color blue)", 1.0),
            ("S", "(is-shape circle)", 1.0),
            ("S", "(is-size small)", 1.0),
            ("S", "(and S S)", 0.6),
            ("S", "(or S S)", 0.6),
            ("S", "(not S)", 0.6),
        ],
        V,
    )


def test_same_seed_identical_chain():
    grammar = default_grammar(V)
    exemplar_list = generate_list(parse_concept("(is-color blue)", V), V, seed=1)
    evidence = evidence_from_list(exemplar_list, upto_set=3)
    noise = NoiseParams(0.9, 0.5)
    a = mh_sample(grammar, evidence, noise, iterations=5000, seed=13, max_size=2)
    b = mh_sample(grammar, evidence, noise, iterations=5000, seed=13, max_size=2)
    assert [(e.concept, e.log_weight) for e in a.entries] == [
        (e.concept, e.log_weight) for e in b.entries
    ]
    c = mh_sample(grammar, evidence, noise, iterations=5000, seed=14, max_size=2)
    assert [(e.concept, e.log_weight) for e in a.entries] != [
        (e.concept, e.log_weight) for e in c.entries
    ]


def test_mode_matches_enumeration_mode():
    grammar = default_grammar(V)
    exemplar_list = generate_list(parse_concept("(is-color blue)", V), V, seed=2)
    evidence = evidence_from_list(exemplar_list, upto_set=10)
    noise = NoiseParams(1.0, 0.5)
    empirical = mh_sample(grammar, evidence, noise, iterations=20_000, seed=5, max_size=2)
    exact = PosteriorState.from_hypotheses(enumerate_hypotheses(grammar, 2), V)
    exact = exact.update_batch(evidence, noise)
    best_exact = max(exact.entries, key=lambda e: e.log_weight).concept
    best_empirical = max(empirical.entries, key=lambda e: e.log_weight).concept
    assert best_exact == best_empirical == parse_concept("(is-color blue)", V)


def test_prior_agreement_without_evidence():
    grammar = small_grammar()
    hypotheses = enumerate_hypotheses(grammar, 3)
    assert len(hypotheses) <= 50
    exact = PosteriorState.from_hypotheses(hypotheses, V)
    empirical = mh_sample(
        grammar, [], NoiseParams(1.0, 0.5), iterations=100_000, seed=3, max_size=3
    )
    assert tv_distance(exact, empirical) < 0.05


def test_posterior_agreement_with_evidence():
    grammar = default_grammar(V)
    exemplar_list = generate_list(parse_concept("(is-shape circle)", V), V, seed=6)
    evidence = evidence_from_list(exemplar_list, upto_set=4)
    noise = NoiseParams(0.85, 0.5)
    hypotheses = enumerate_hypotheses(grammar, 2)
    assert len(hypotheses) <= 200
    exact = PosteriorState.from_hypotheses(hypotheses, V).update_batch(evidence, noise)
    empirical = mh_sample(grammar, evidence, noise, iterations=100_000, seed=9, max_size=2)
    assert tv_distance(exact, empirical) < 0.05


def test_size_bound_respected():
    grammar = default_grammar(V)
    empirical = mh_sample(
        grammar, [], NoiseParams(1.0, 0.5), iterations=20_000, seed=1, max_size=2
    )
    from rulelab.dsl import size

    assert all(size(e.concept) <= 2 for e in empirical.entries)


def test_run_mh_learns_a_simple_rule():
    grammar = default_grammar(V)
    concept = parse_concept("(is-color blue)", V)
    exemplar_list = generate_list(concept, V, seed=17, rule_id="blue")
    run = run_mh(exemplar_list, grammar, NoiseParams(0.95, 0.5), iterations=4000, seed=2, max_size=2)
    assert run.final_map == concept
    late = run.per_set[-5:]
    correct = total = 0
    for prediction in late:
        gold = exemplar_list.sets[prediction.set_index].labels
        correct += sum(a == b for a, b in zip(prediction.labels, gold))
        total += len(gold)
    assert correct / total >= 0.9
