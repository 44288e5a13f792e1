"""Truth-functional equivalence over a bounded universe of contexts.

Two concepts are equivalent up to ``max_set_size`` when they evaluate
identically on every multiset of 1..max_set_size objects drawn from the
vocabulary's object universe, for every choice of target.  Contexts equal
as multisets-with-target are enumerated once: the target is placed at
position 0 and the remaining objects form a sorted multiset, which is
sound because evaluation never depends on the order of non-target objects.
"""

from __future__ import annotations

import itertools
import math
from typing import Iterator

from .core import Concept, Context, DslError, FeatureVocab, Obj, evaluate, is_target_only


class ContextBudgetError(DslError):
    """The bounded universe is larger than the caller's enumeration cap."""


def object_universe(vocab: FeatureVocab) -> tuple[Obj, ...]:
    """Every distinct object expressible in the vocabulary."""
    return tuple(
        Obj(s, c, h)
        for s in range(len(vocab.sizes))
        for c in range(len(vocab.colors))
        for h in range(len(vocab.shapes))
    )


def count_contexts(vocab: FeatureVocab, max_set_size: int) -> int:
    """Number of canonical contexts enumerated up to ``max_set_size``."""
    n = vocab.n_objects()
    return n * sum(math.comb(n + r - 1, r) for r in range(max_set_size))


def enumerate_contexts(vocab: FeatureVocab, max_set_size: int) -> Iterator[Context]:
    """Yield each canonical context once (target at position 0)."""
    universe = object_universe(vocab)
    for k in range(1, max_set_size + 1):
        for rest in itertools.combinations_with_replacement(universe, k - 1):
            for target in universe:
                yield Context((target,) + rest, 0)


def equivalent(
    a: Concept,
    b: Concept,
    vocab: FeatureVocab,
    max_set_size: int = 5,
    max_contexts: int = 2_000_000,
) -> bool:
    """Decide truth-functional equivalence over the bounded universe.

    Raises :class:`ContextBudgetError` when the enumeration would exceed
    ``max_contexts``; callers can lower ``max_set_size`` and retry.
    """
    if max_set_size < 1:
        raise DslError("max_set_size must be at least 1")
    if a == b:
        return True
    if is_target_only(a) and is_target_only(b):
        # Truth depends only on the target object: single-object contexts
        # cover the whole universe of behaviors.
        return all(
            evaluate(a, ctx) == evaluate(b, ctx)
            for obj in object_universe(vocab)
            for ctx in (Context((obj,), 0),)
        )
    total = count_contexts(vocab, max_set_size)
    if total > max_contexts:
        raise ContextBudgetError(
            f"{total} contexts exceed the cap of {max_contexts}; lower max_set_size"
        )
    return all(
        evaluate(a, ctx) == evaluate(b, ctx) for ctx in enumerate_contexts(vocab, max_set_size)
    )
