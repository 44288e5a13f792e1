"""The logical concept language: AST, parser, evaluator, equivalence."""

from .core import (
    And,
    Concept,
    Context,
    DIMENSIONS,
    DslError,
    FeatureIs,
    FeatureVocab,
    Iff,
    Implies,
    MajorityColor,
    MinorityColor,
    Not,
    Obj,
    Or,
    Quant,
    QUANT_KINDS,
    QUANT_SCOPES,
    Rel,
    REL_KINDS,
    UnboundVariableError,
    Xor,
    depth,
    evaluate,
    is_target_only,
    max_var_excess,
    size,
)
from .equivalence import (
    ContextBudgetError,
    count_contexts,
    enumerate_contexts,
    equivalent,
    object_universe,
)
from .sexpr import (
    ConceptSyntaxError,
    load_concept_file,
    load_vocab,
    parse_concept,
    print_concept,
    save_vocab,
)

__all__ = [
    "And",
    "Concept",
    "ConceptSyntaxError",
    "Context",
    "ContextBudgetError",
    "DIMENSIONS",
    "DslError",
    "FeatureIs",
    "FeatureVocab",
    "Iff",
    "Implies",
    "MajorityColor",
    "MinorityColor",
    "Not",
    "Obj",
    "Or",
    "Quant",
    "QUANT_KINDS",
    "QUANT_SCOPES",
    "Rel",
    "REL_KINDS",
    "UnboundVariableError",
    "Xor",
    "count_contexts",
    "depth",
    "enumerate_contexts",
    "equivalent",
    "evaluate",
    "is_target_only",
    "max_var_excess",
    "load_concept_file",
    "load_vocab",
    "object_universe",
    "parse_concept",
    "print_concept",
    "save_vocab",
    "size",
]
