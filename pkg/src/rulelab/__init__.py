"""rulelab: a concept-induction laboratory.

A DSL for logical concepts over small object sets, seeded exemplar-list
generation, a Bayesian grammar-based learner, a hosted-model labeling
harness, and the metrics that compare learners to human learning
trajectories.
"""

from . import catalog, dsl, exemplars, harness, learner, metrics
from .catalog import ALTERNATE_VOCAB, DEFAULT_VOCAB, DEMO_RULES, RuleSpec

__version__ = "0.1.0"

__all__ = [
    "ALTERNATE_VOCAB",
    "DEFAULT_VOCAB",
    "DEMO_RULES",
    "RuleSpec",
    "catalog",
    "dsl",
    "exemplars",
    "harness",
    "learner",
    "metrics",
]
