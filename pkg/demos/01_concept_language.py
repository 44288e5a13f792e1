"""Tour of the concept language: parsing, evaluation, equivalence.

Concepts classify one *target* object within a displayed set of one to five
objects.  Run this script to see the language's pieces in action:

    python3 demos/01_concept_language.py
"""

from rulelab.catalog import DEFAULT_VOCAB as vocab
from rulelab.dsl import (
    Context,
    Obj,
    depth,
    equivalent,
    evaluate,
    parse_concept,
    print_concept,
    size,
)


def obj(text):
    size_name, color_name, shape_name = text.split()
    return Obj(
        vocab.index("size", size_name),
        vocab.index("color", color_name),
        vocab.index("shape", shape_name),
    )


# --- 1. Parsing and printing ------------------------------------------------
# The concrete syntax is parenthesized prefix notation.  Variables are
# de Bruijn indices: 0 is the innermost quantified object, and the target
# sits one step outside the outermost quantifier.

sources = [
    "(is-color blue)",
    "(xor (is-shape circle) (is-color blue))",
    "(exists others (and (same-shape 0 1) (is-color yellow 0)))",  # "same shape as a yellow object"
    "(and (is-color blue) (not (exists others (is-color blue 0))))",  # "the unique blue object"
    "(forall others (size-ge 1 0))",  # "one of the largest"
    "(majority-color)",
]
print("== parsing and printing ==")
for source in sources:
    concept = parse_concept(source, vocab)
    print(f"  {source}")
    print(f"    -> size {size(concept)}, depth {depth(concept)}, prints as {print_concept(concept, vocab)}")

# --- 2. Evaluating concepts on displayed sets --------------------------------
print("\n== evaluation ==")
scene = (obj("small blue circle"), obj("large blue rectangle"), obj("medium green circle"))
unique_blue = parse_concept("(and (is-color blue) (not (exists others (is-color blue 0))))", vocab)
for target in range(3):
    ctx = Context(scene, target)
    print(f"  target = {scene[target].render(vocab)!r}: unique-blue -> {evaluate(unique_blue, ctx)}")

same_shape_as_yellow = parse_concept(
    "(exists others (and (same-shape 0 1) (is-color yellow 0)))", vocab
)
scene2 = (obj("medium blue rectangle"), obj("large yellow rectangle"), obj("small yellow circle"))
print(f"  scene: {[o.render(vocab) for o in scene2]}")
for target in range(3):
    value = evaluate(same_shape_as_yellow, Context(scene2, target))
    print(f"  target = {scene2[target].render(vocab)!r}: same-shape-as-a-yellow -> {value}")

# --- 3. Truth-functional equivalence over the bounded universe ---------------
# Two concepts are equivalent when they agree on every multiset of up to
# five objects with every choice of target.  Rewrites that look very
# different can name the same classification rule.
print("\n== equivalence ==")
pairs = [
    ("(not (is-shape circle))", "(or (is-shape triangle) (is-shape rectangle))"),
    ("(or (is-color blue) (is-color green))", "(not (is-color yellow))"),
    ("(is-color blue)", "(is-shape circle)"),
]
for left, right in pairs:
    verdict = equivalent(parse_concept(left, vocab), parse_concept(right, vocab), vocab)
    print(f"  {left}  ==  {right}?  {verdict}")

# Quantifier duality holds as an equivalence, not just pointwise:
left = parse_concept("(forall others (size-ge 1 0))", vocab)
right = parse_concept("(not (exists others (not (size-ge 1 0))))", vocab)
print(f"  forall == not-exists-not? {equivalent(left, right, vocab, max_set_size=3)}")
