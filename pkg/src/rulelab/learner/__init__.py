"""Bayesian hypothesis learner: grammar, enumeration, MCMC, noise fitting."""

from .fit import fit_noise, noise_grid, predictive_trajectory
from .grammar import (
    Derivation,
    Grammar,
    GrammarError,
    Hole,
    Production,
    default_grammar,
    grammar_from_pairs,
    load_grammar,
    sample_derivation,
    save_grammar,
    substitute,
)
from .inference import (
    DegeneratePosteriorError,
    EmptyStateError,
    EvalMatrix,
    HypothesisBudgetError,
    HypothesisEntry,
    LearnerRun,
    NoiseParams,
    PosteriorState,
    SetPrediction,
    build_eval_matrix,
    classify,
    enumerate_hypotheses,
    evidence_from_list,
    log_likelihood,
    logsumexp,
    map_rule,
    observation_log_factor,
    posterior_predictive,
    run_enumerative,
)
from .mcmc import mh_sample, run_mh

__all__ = [
    "DegeneratePosteriorError",
    "Derivation",
    "EmptyStateError",
    "EvalMatrix",
    "Grammar",
    "GrammarError",
    "Hole",
    "HypothesisBudgetError",
    "HypothesisEntry",
    "LearnerRun",
    "NoiseParams",
    "PosteriorState",
    "Production",
    "SetPrediction",
    "build_eval_matrix",
    "classify",
    "default_grammar",
    "enumerate_hypotheses",
    "evidence_from_list",
    "fit_noise",
    "grammar_from_pairs",
    "load_grammar",
    "log_likelihood",
    "logsumexp",
    "map_rule",
    "mh_sample",
    "noise_grid",
    "observation_log_factor",
    "posterior_predictive",
    "predictive_trajectory",
    "run_enumerative",
    "run_mh",
    "sample_derivation",
    "save_grammar",
    "substitute",
]
