"""The Bayesian learner: grammar, posterior evolution, and MCMC.

The learner scores every concept its grammar derives (up to a node budget)
against the labels seen so far, under a two-parameter noise model: labels
follow the rule with probability alpha, otherwise they are True with
probability beta.

    python3 demos/03_bayesian_learner.py
"""

import math

from rulelab.catalog import DEFAULT_VOCAB as vocab
from rulelab.dsl import parse_concept, print_concept
from rulelab.exemplars import generate_list
from rulelab.learner import (
    NoiseParams,
    PosteriorState,
    default_grammar,
    enumerate_hypotheses,
    evidence_from_list,
    mh_sample,
    run_enumerative,
)

grammar = default_grammar(vocab)
noise = NoiseParams(alpha=0.95, beta=0.5)

# --- 1. The hypothesis space --------------------------------------------------
for bound in (1, 2, 3):
    hypotheses = enumerate_hypotheses(grammar, bound)
    mass = sum(math.exp(lp) for _c, lp in hypotheses)
    print(f"size <= {bound}: {len(hypotheses):4d} concepts, prior mass {mass:.3f}")

# --- 2. Watching the posterior learn a rule -----------------------------------
rule = parse_concept("(and (is-color blue) (is-shape circle))", vocab)
exemplar_list = generate_list(rule, vocab, seed=23, rule_id="blue-circle")
run = run_enumerative(exemplar_list, grammar, noise, max_size=3)

print("\nset | MAP rule so far                                  | set accuracy")
for prediction in run.per_set:
    gold = exemplar_list.sets[prediction.set_index].labels
    set_accuracy = sum(a == b for a, b in zip(prediction.labels, gold)) / len(gold)
    if prediction.set_index % 4 == 0 or prediction.set_index == 24:
        printed = print_concept(prediction.map_concept, vocab)
        print(f" {prediction.set_index + 1:2d} | {printed:48s} | {set_accuracy:.2f}")
print(f"final MAP: {print_concept(run.final_map, vocab)}")

# --- 3. The posterior-predictive mixes rule following with baseline noise -----
state = PosteriorState.from_hypotheses(enumerate_hypotheses(grammar, 3), vocab)
state = state.update_batch(evidence_from_list(exemplar_list, upto_set=10), noise)
ctx = exemplar_list.sets[10].context_for(0)
from rulelab.learner import classify, map_rule, posterior_predictive

print(f"\nafter 10 sets: MAP = {print_concept(map_rule(state), vocab)}")
print(f"P(True) for {ctx.objects[ctx.target].render(vocab)!r}: "
      f"{posterior_predictive(state, ctx, noise):.3f} "
      f"-> label {classify(state, ctx, noise)}")

# --- 4. MCMC agrees with exact enumeration ------------------------------------
# Metropolis-Hastings with subtree-regeneration proposals targets the same
# truncated posterior; on small spaces the two coincide closely.
evidence = evidence_from_list(exemplar_list, upto_set=6)
exact = PosteriorState.from_hypotheses(enumerate_hypotheses(grammar, 2), vocab)
exact = exact.update_batch(evidence, noise)
empirical = mh_sample(grammar, evidence, noise, iterations=60_000, seed=4, max_size=2)

exact_mass = {e.concept: math.exp(e.log_weight) for e in exact.entries}
empirical_mass = {e.concept: math.exp(e.log_weight) for e in empirical.entries}
support = set(exact_mass) | set(empirical_mass)
tv = 0.5 * sum(abs(exact_mass.get(c, 0) - empirical_mass.get(c, 0)) for c in support)
print(f"\nMH vs enumeration total-variation distance: {tv:.4f} (60k iterations)")

top = sorted(exact.entries, key=lambda e: -e.log_weight)[:3]
print("top exact posterior mass:")
for entry in top:
    print(f"  {math.exp(entry.log_weight):6.3f}  {print_concept(entry.concept, vocab)}")
