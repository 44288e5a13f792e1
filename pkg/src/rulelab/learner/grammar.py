"""Weighted context-free grammars over concept templates.

A production rewrites a nonterminal into a concept fragment whose unexpanded
nonterminals appear as :class:`Hole` leaves, e.g. ``S -> (and S S)``.
Hypotheses are derivation trees: one production application per node, with
one child derivation per hole.  The prior of a derivation is the product of
its production probabilities (weights normalized per nonterminal).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from math import log
from pathlib import Path

from ..dsl import (
    And,
    Concept,
    DslError,
    FeatureIs,
    FeatureVocab,
    Iff,
    Implies,
    MajorityColor,
    MinorityColor,
    Not,
    Or,
    Quant,
    Rel,
    UnboundVariableError,
    Xor,
)
from ..dsl.sexpr import parse_template, print_concept


class GrammarError(DslError):
    pass


@dataclass(frozen=True, slots=True)
class Hole(Concept):
    """A nonterminal occurrence inside a production template."""

    nonterminal: str


def _template_parts(template: Concept, depth: int = 0):
    """Yield (node, binder depth) for every node of a template, holes included."""
    yield template, depth
    if isinstance(template, Not):
        yield from _template_parts(template.body, depth)
    elif isinstance(template, Quant):
        yield from _template_parts(template.body, depth + 1)
    elif isinstance(template, (And, Or, Xor, Implies, Iff)):
        yield from _template_parts(template.left, depth)
        yield from _template_parts(template.right, depth)


@dataclass(frozen=True)
class Production:
    lhs: str
    source: str
    template: Concept
    weight: float

    def __post_init__(self):
        if self.weight <= 0:
            raise GrammarError(f"production {self.lhs} -> {self.source!r} has weight <= 0")

    @property
    def holes(self) -> tuple[tuple[str, int], ...]:
        """(nonterminal, binder depth) per hole, in left-to-right order."""
        return tuple(
            (node.nonterminal, depth)
            for node, depth in _template_parts(self.template)
            if isinstance(node, Hole)
        )

    @property
    def skeleton_size(self) -> int:
        """Concept nodes this production contributes by itself."""
        return sum(
            1 for node, _depth in _template_parts(self.template) if not isinstance(node, Hole)
        )

    def max_var_reach(self) -> int:
        """Largest (var index - local binder depth) over the template's
        variable references; bounds how many outer binders it needs."""
        reach = -1
        for node, depth in _template_parts(self.template):
            if isinstance(node, (FeatureIs, MajorityColor, MinorityColor)):
                reach = max(reach, node.var - depth)
            elif isinstance(node, Rel):
                reach = max(reach, node.left - depth, node.right - depth)
        return reach


def substitute(template: Concept, fills: list[Concept]) -> Concept:
    """Replace the template's holes, left to right, with ``fills``."""
    def walk(node: Concept) -> Concept:
        if isinstance(node, Hole):
            return fills[next(counter)]
        if isinstance(node, Not):
            return Not(walk(node.body))
        if isinstance(node, Quant):
            return Quant(node.kind, node.scope, walk(node.body))
        if isinstance(node, (And, Or, Xor, Implies, Iff)):
            return type(node)(walk(node.left), walk(node.right))
        return node

    counter = iter(range(len(fills)))
    result = walk(template)
    try:
        next(counter)
    except StopIteration:
        return result
    raise GrammarError("more fills than holes")


@dataclass(frozen=True)
class Grammar:
    start: str
    productions: tuple[Production, ...]
    vocab: FeatureVocab

    def __post_init__(self):
        by_lhs: dict[str, list[Production]] = {}
        for production in self.productions:
            by_lhs.setdefault(production.lhs, []).append(production)
        if self.start not in by_lhs:
            raise GrammarError(f"start symbol {self.start!r} has no productions")
        for production in self.productions:
            for nonterminal, _depth in production.holes:
                if nonterminal not in by_lhs:
                    raise GrammarError(
                        f"nonterminal {nonterminal!r} in {production.source!r} has no productions"
                    )
        object.__setattr__(self, "_by_lhs", {k: tuple(v) for k, v in by_lhs.items()})
        object.__setattr__(
            self,
            "_log_probs",
            {
                production: log(production.weight / sum(p.weight for p in by_lhs[production.lhs]))
                for production in self.productions
            },
        )
        object.__setattr__(self, "_min_sizes", self._compute_min_sizes())
        self._check_variable_scopes()

    @property
    def nonterminals(self) -> tuple[str, ...]:
        return tuple(self._by_lhs)

    def productions_for(self, nonterminal: str) -> tuple[Production, ...]:
        try:
            return self._by_lhs[nonterminal]
        except KeyError:
            raise GrammarError(f"unknown nonterminal {nonterminal!r}") from None

    def log_probability(self, production: Production) -> float:
        return self._log_probs[production]

    def min_size(self, nonterminal: str) -> int:
        return self._min_sizes[nonterminal]

    def _compute_min_sizes(self) -> dict[str, int]:
        sizes = {nt: None for nt in self._by_lhs}
        changed = True
        while changed:
            changed = False
            for nt, productions in self._by_lhs.items():
                for production in productions:
                    child_sizes = [sizes[h] for h, _d in production.holes]
                    if any(s is None for s in child_sizes):
                        continue
                    candidate = production.skeleton_size + sum(child_sizes)
                    if sizes[nt] is None or candidate < sizes[nt]:
                        sizes[nt] = candidate
                        changed = True
        dead = [nt for nt, s in sizes.items() if s is None]
        if dead:
            raise GrammarError(f"nonterminals {dead} cannot derive any finite concept")
        return sizes

    def _check_variable_scopes(self):
        # Minimum binder depth at which each nonterminal can occur, starting
        # from the start symbol at depth 0 (target only).  A var reference is
        # well-formed at the minimum depth iff it is well-formed at every
        # reachable depth, since extra binders only add resolvable indices.
        min_depth = {self.start: 0}
        frontier = [self.start]
        while frontier:
            nt = frontier.pop()
            for production in self._by_lhs[nt]:
                for child, local_depth in production.holes:
                    candidate = min_depth[nt] + local_depth
                    if child not in min_depth or candidate < min_depth[child]:
                        min_depth[child] = candidate
                        frontier.append(child)
        for production in self.productions:
            if production.lhs not in min_depth:
                continue  # unreachable from start; harmless
            reach = production.max_var_reach()
            if reach > min_depth[production.lhs]:
                raise UnboundVariableError(
                    f"production {production.lhs} -> {production.source!r} references a "
                    f"variable {reach} binder(s) beyond what its shallowest use provides"
                )


@dataclass(frozen=True)
class Derivation:
    production: Production
    children: tuple["Derivation", ...]

    def concept(self) -> Concept:
        return substitute(self.production.template, [c.concept() for c in self.children])

    def concept_size(self) -> int:
        return self.production.skeleton_size + sum(c.concept_size() for c in self.children)

    def n_applications(self) -> int:
        return 1 + sum(c.n_applications() for c in self.children)

    def log_prior(self, grammar: Grammar) -> float:
        return grammar.log_probability(self.production) + sum(
            c.log_prior(grammar) for c in self.children
        )


def sample_derivation(
    grammar: Grammar,
    rng: random.Random,
    nonterminal: str | None = None,
    max_depth: int = 80,
) -> Derivation:
    """Draw a derivation from the grammar's prior.

    Recursion deeper than ``max_depth`` restarts the draw; restarts consume
    randomness deterministically, so equal seeds still give equal samples.
    """
    nt = grammar.start if nonterminal is None else nonterminal

    def draw(symbol: str, depth: int) -> Derivation:
        if depth > max_depth:
            raise _TooDeep()
        productions = grammar.productions_for(symbol)
        weights = [p.weight for p in productions]
        production = rng.choices(productions, weights=weights)[0]
        children = tuple(draw(child, depth + 1) for child, _d in production.holes)
        return Derivation(production, children)

    while True:
        try:
            return draw(nt, 0)
        except _TooDeep:
            continue


class _TooDeep(Exception):
    pass


def default_grammar(vocab: FeatureVocab) -> Grammar:
    """The stock hypothesis grammar: Boolean connectives over the target's
    features plus single quantification over the other objects, with uniform
    per-nonterminal weights."""
    s_templates = []
    q_templates = []
    for dim in ("size", "color", "shape"):
        for value in vocab.values(dim):
            s_templates.append(f"(is-{dim} {value})")
            q_templates.append(f"(is-{dim} {value} 0)")
    s_templates += ["(majority-color)", "(minority-color)"]
    s_templates += ["(not S)", "(and S S)", "(or S S)", "(xor S S)", "(implies S S)", "(iff S S)"]
    s_templates += ["(exists others Q)", "(forall others Q)", "(exactly-one others Q)"]
    q_templates += [
        "(same-color 0 1)",
        "(same-shape 0 1)",
        "(same-size 0 1)",
        "(size-gt 0 1)",
        "(size-ge 0 1)",
        "(size-gt 1 0)",
        "(size-ge 1 0)",
    ]
    q_templates += ["(not Q)", "(and Q Q)", "(or Q Q)"]
    productions = [("S", t) for t in s_templates] + [("Q", t) for t in q_templates]
    return grammar_from_pairs("S", productions, vocab)


def grammar_from_pairs(
    start: str,
    pairs: list[tuple[str, str]] | list[tuple[str, str, float]],
    vocab: FeatureVocab,
) -> Grammar:
    """Build a grammar from (lhs, template[, weight]) rows; weight defaults to 1."""
    rows = [(p[0], p[1], p[2] if len(p) > 2 else 1.0) for p in pairs]
    productions = tuple(
        Production(lhs, source, parse_template(source, vocab), weight)
        for lhs, source, weight in rows
    )
    return Grammar(start=start, productions=productions, vocab=vocab)


def load_grammar(path: str | Path, vocab: FeatureVocab) -> Grammar:
    """Read a grammar JSON document:
    {"start": ..., "productions": [{"lhs", "template", "weight"}, ...]}."""
    doc = json.loads(Path(path).read_text())
    pairs = [
        (row["lhs"], row["template"], float(row.get("weight", 1.0)))
        for row in doc["productions"]
    ]
    return grammar_from_pairs(doc["start"], pairs, vocab)


def save_grammar(grammar: Grammar, path: str | Path) -> None:
    doc = {
        "start": grammar.start,
        "productions": [
            {"lhs": p.lhs, "template": p.source, "weight": p.weight}
            for p in grammar.productions
        ],
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def describe_concept(concept: Concept, grammar: Grammar) -> str:
    return print_concept(concept, grammar.vocab)
