"""Grading elicited rules and scoring learning behavior.

    python3 demos/04_grading_and_metrics.py
"""

from rulelab.catalog import DEFAULT_VOCAB as vocab
from rulelab.dsl import evaluate, parse_concept
from rulelab.exemplars import generate_list
from rulelab.learner import evidence_from_list
from rulelab.metrics import (
    LabelSeries,
    ObjectRecord,
    SetReport,
    accuracy,
    chance_baseline,
    consistency,
    cross_entropy,
    last_quarter_count,
    match_rate,
    r_squared,
    rule_likelihood,
)

# --- 1. Accuracy windows -------------------------------------------------------
# "Last quarter" means the final ceil(N/4) objects by presentation order;
# excluded objects are dropped after the window is cut.
gold_rule = parse_concept("(is-color blue)", vocab)
exemplar_list = generate_list(gold_rule, vocab, seed=3, rule_id="blue")
records = []
for set_index, object_index, ctx, label in exemplar_list.iter_items():
    model = label if (set_index + object_index) % 7 else not label  # imperfect labeler
    records.append(ObjectRecord(set_index, object_index, label, model))
series = LabelSeries("blue", records)
n = exemplar_list.n_objects
print(f"list of {n} objects; last-quarter window = {last_quarter_count(n)} objects")
print(f"overall accuracy      : {accuracy(series):.3f}")
print(f"last-quarter accuracy : {accuracy(series, 'last_quarter'):.3f}")
true_rate = sum(r.gold for r in records) / n
print(f"chance baseline at p={true_rate:.2f}: {chance_baseline(true_rate):.3f}")

# --- 2. Likelihood: how much of the seen evidence a rule explains ---------------
evidence = evidence_from_list(exemplar_list, upto_set=12)
for source in ("(is-color blue)", "(not (is-color yellow))", "(is-shape circle)"):
    candidate = parse_concept(source, vocab)
    print(f"likelihood of {source:24s} after 12 sets: "
          f"{rule_likelihood(candidate, evidence):.3f}")

# --- 3. Consistency: do emitted labels follow the reported rule? ----------------
reported = parse_concept("(is-color blue)", vocab)
session = []
for exemplar_set in exemplar_list.sets[:10]:
    labels = tuple(
        (exemplar_set.context_for(i), evaluate(reported, exemplar_set.context_for(i)))
        for i in range(len(exemplar_set.objects))
    )
    session.append(SetReport(concept=reported, labels=labels))
print(f"consistency of a self-applied rule: {consistency(session):.3f}")

# --- 4. Match rate: strict likelihood-1.0 plus bounded-universe equivalence -----
lists = {
    "not-circle": generate_list(parse_concept("(not (is-shape circle))", vocab), vocab,
                                seed=5, rule_id="not-circle"),
    "blue": generate_list(gold_rule, vocab, seed=6, rule_id="blue"),
}
finals = {
    "not-circle": parse_concept("(or (is-shape triangle) (is-shape rectangle))", vocab),
    "blue": parse_concept("(is-color green)", vocab),
}
report = match_rate(finals, lists, vocab)
for verdict in report.verdicts:
    print(f"rule {verdict.rule_id!r}: likelihood {verdict.likelihood}, "
          f"match={verdict.matches}, equivalent={verdict.equivalent}")
print(f"match rate {report.match_rate:.2f}, equivalence rate {report.equivalence_rate:.2f}")

# --- 5. Correlation with human proportions and the tuning loss ------------------
model_p = [0.9, 0.8, 0.6, 0.3, 0.2, 0.75]
human_p = [0.95, 0.7, 0.55, 0.4, 0.1, 0.8]
print(f"r^2 against human proportions: {r_squared(model_p, human_p):.3f}")
loss = sum(cross_entropy(h, m) for h, m in zip(human_p, model_p))
print(f"summed cross-entropy to the human targets: {loss:.3f} nats")
