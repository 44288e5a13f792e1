"""Pointwise logical identities over random concepts and contexts."""

from hypothesis import given, settings

from conftest import concept_strategy, context_strategy
from rulelab.dsl import And, Iff, Implies, Not, Or, Quant, Xor, evaluate


@settings(max_examples=300, deadline=None)
@given(concept_strategy(), concept_strategy(), context_strategy())
def test_de_morgan(a, b, ctx):
    assert evaluate(Not(And(a, b)), ctx) == evaluate(Or(Not(a), Not(b)), ctx)


@settings(max_examples=300, deadline=None)
@given(concept_strategy(), concept_strategy(), context_strategy())
def test_xor_is_not_iff(a, b, ctx):
    assert evaluate(Xor(a, b), ctx) == evaluate(Not(Iff(a, b)), ctx)


@settings(max_examples=300, deadline=None)
@given(concept_strategy(), concept_strategy(), context_strategy())
def test_implies_is_or_not(a, b, ctx):
    assert evaluate(Implies(a, b), ctx) == evaluate(Or(Not(a), b), ctx)


@settings(max_examples=300, deadline=None)
@given(concept_strategy(max_budget=5, binders=1), context_strategy())
def test_quantifier_duality(body, ctx):
    for scope in ("others", "all"):
        universal = Quant("forall", scope, body)
        dual = Not(Quant("exists", scope, Not(body)))
        assert evaluate(universal, ctx) == evaluate(dual, ctx)


@settings(max_examples=300, deadline=None)
@given(concept_strategy(), concept_strategy(), context_strategy())
def test_double_negation_and_commutativity(a, b, ctx):
    assert evaluate(Not(Not(a)), ctx) == evaluate(a, ctx)
    assert evaluate(And(a, b), ctx) == evaluate(And(b, a), ctx)
    assert evaluate(Or(a, b), ctx) == evaluate(Or(b, a), ctx)
