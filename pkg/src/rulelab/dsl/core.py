"""Object features, display contexts, and the logical concept AST.

A concept classifies one *target* object within a displayed set of one to
five objects.  Concepts range from simple feature tests ("is blue") through
Boolean combinations up to first-order statements that quantify over the
rest of the set ("same shape as a yellow object", "the only blue object").

Variable references are de Bruijn indices: 0 is the variable bound by the
innermost enclosing quantifier, and the target object sits one step outside
the outermost quantifier.  A concept with no quantifiers therefore refers
to the target as variable 0.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

DIMENSIONS = ("size", "color", "shape")

QUANT_KINDS = ("exists", "forall", "exactly-one")
QUANT_SCOPES = ("others", "all")
REL_KINDS = ("same-color", "same-shape", "same-size", "size-gt", "size-ge")


class DslError(Exception):
    """Base class for concept-language errors."""


class UnboundVariableError(DslError):
    pass


@dataclass(frozen=True)
class FeatureVocab:
    """The feature values objects can take.

    ``sizes`` is ordered: its index order is the size order used by the
    size-comparison relations.
    """

    sizes: tuple[str, ...] = ("small", "medium", "large")
    colors: tuple[str, ...] = ("blue", "green", "yellow")
    shapes: tuple[str, ...] = ("circle", "rectangle", "triangle")

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(self.sizes))
        object.__setattr__(self, "colors", tuple(self.colors))
        object.__setattr__(self, "shapes", tuple(self.shapes))
        for dim in DIMENSIONS:
            values = self.values(dim)
            if not values:
                raise DslError(f"vocab dimension {dim!r} is empty")
            if len(set(values)) != len(values):
                raise DslError(f"vocab dimension {dim!r} has duplicate values")

    def values(self, dim: str) -> tuple[str, ...]:
        if dim == "size":
            return self.sizes
        if dim == "color":
            return self.colors
        if dim == "shape":
            return self.shapes
        raise DslError(f"unknown dimension {dim!r}")

    def index(self, dim: str, name: str) -> int:
        try:
            return self.values(dim).index(name)
        except ValueError:
            raise DslError(f"unknown {dim} value {name!r}") from None

    def n_objects(self) -> int:
        return len(self.sizes) * len(self.colors) * len(self.shapes)


@dataclass(frozen=True, slots=True)
class Obj:
    """One displayed object, as indices into a bound vocabulary."""

    size: int
    color: int
    shape: int

    def render(self, vocab: FeatureVocab) -> str:
        return f"{vocab.sizes[self.size]} {vocab.colors[self.color]} {vocab.shapes[self.shape]}"


@dataclass(frozen=True, slots=True)
class Context:
    """A displayed set of 1-5 objects with a designated target object."""

    objects: tuple[Obj, ...]
    target: int

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        if not 1 <= len(self.objects) <= 5:
            raise DslError(f"context must hold 1-5 objects, got {len(self.objects)}")
        if not 0 <= self.target < len(self.objects):
            raise DslError(f"target index {self.target} out of range")


class Concept:
    """Base class for concept AST nodes.  Nodes are immutable."""

    __slots__ = ()


@dataclass(frozen=True, slots=True)
class FeatureIs(Concept):
    dim: str
    value: int
    var: int = 0


@dataclass(frozen=True, slots=True)
class Not(Concept):
    body: Concept


@dataclass(frozen=True, slots=True)
class And(Concept):
    left: Concept
    right: Concept


@dataclass(frozen=True, slots=True)
class Or(Concept):
    left: Concept
    right: Concept


@dataclass(frozen=True, slots=True)
class Xor(Concept):
    left: Concept
    right: Concept


@dataclass(frozen=True, slots=True)
class Implies(Concept):
    left: Concept
    right: Concept


@dataclass(frozen=True, slots=True)
class Iff(Concept):
    left: Concept
    right: Concept


@dataclass(frozen=True, slots=True)
class Quant(Concept):
    """Quantifier binding one fresh variable over the displayed set.

    ``scope`` is "others" (every object except the target) or "all"
    (every object including the target).
    """

    kind: str
    scope: str
    body: Concept


@dataclass(frozen=True, slots=True)
class Rel(Concept):
    """Binary feature relation between two in-scope variables."""

    kind: str
    left: int
    right: int


@dataclass(frozen=True, slots=True)
class MajorityColor(Concept):
    """True iff the variable's color count strictly exceeds every other
    color count present in the set."""

    var: int = 0


@dataclass(frozen=True, slots=True)
class MinorityColor(Concept):
    """True iff the variable's color count is strictly below every other
    color count present in the set."""

    var: int = 0


def size(concept: Concept) -> int:
    """Node count of the AST."""
    if isinstance(concept, (FeatureIs, Rel, MajorityColor, MinorityColor)):
        return 1
    if isinstance(concept, Not):
        return 1 + size(concept.body)
    if isinstance(concept, Quant):
        return 1 + size(concept.body)
    if isinstance(concept, (And, Or, Xor, Implies, Iff)):
        return 1 + size(concept.left) + size(concept.right)
    raise DslError(f"not a concept node: {concept!r}")


def depth(concept: Concept) -> int:
    """Maximum nesting depth of the AST."""
    if isinstance(concept, (FeatureIs, Rel, MajorityColor, MinorityColor)):
        return 1
    if isinstance(concept, Not):
        return 1 + depth(concept.body)
    if isinstance(concept, Quant):
        return 1 + depth(concept.body)
    if isinstance(concept, (And, Or, Xor, Implies, Iff)):
        return 1 + max(depth(concept.left), depth(concept.right))
    raise DslError(f"not a concept node: {concept!r}")


def max_var_excess(concept: Concept, binders: int = 0) -> int:
    """How far variable references reach beyond the available binders.

    0 means every reference resolves to a binder or the implicit target;
    anything positive is an unbound reference.
    """
    if isinstance(concept, FeatureIs):
        return max(0, concept.var - binders)
    if isinstance(concept, (MajorityColor, MinorityColor)):
        return max(0, concept.var - binders)
    if isinstance(concept, Rel):
        return max(0, concept.left - binders, concept.right - binders)
    if isinstance(concept, Not):
        return max_var_excess(concept.body, binders)
    if isinstance(concept, Quant):
        return max_var_excess(concept.body, binders + 1)
    if isinstance(concept, (And, Or, Xor, Implies, Iff)):
        return max(
            max_var_excess(concept.left, binders),
            max_var_excess(concept.right, binders),
        )
    raise DslError(f"not a concept node: {concept!r}")


def is_target_only(concept: Concept) -> bool:
    """True when the concept's truth value depends only on the target object.

    Holds for quantifier- and relation-free concepts; used to shortcut
    equivalence checking to single-object contexts.
    """
    if isinstance(concept, FeatureIs):
        return concept.var == 0
    if isinstance(concept, (Rel, Quant, MajorityColor, MinorityColor)):
        return False
    if isinstance(concept, Not):
        return is_target_only(concept.body)
    if isinstance(concept, (And, Or, Xor, Implies, Iff)):
        return is_target_only(concept.left) and is_target_only(concept.right)
    raise DslError(f"not a concept node: {concept!r}")


def _resolve(var: int, env: tuple[int, ...], target: int) -> int:
    if var < len(env):
        return env[var]
    if var == len(env):
        return target
    raise UnboundVariableError(f"variable {var} unbound under {len(env)} binder(s)")


def _eval(concept: Concept, objects: tuple[Obj, ...], target: int, env: tuple[int, ...]) -> bool:
    if isinstance(concept, FeatureIs):
        obj = objects[_resolve(concept.var, env, target)]
        if concept.dim == "size":
            return obj.size == concept.value
        if concept.dim == "color":
            return obj.color == concept.value
        return obj.shape == concept.value
    if isinstance(concept, And):
        return _eval(concept.left, objects, target, env) and _eval(concept.right, objects, target, env)
    if isinstance(concept, Or):
        return _eval(concept.left, objects, target, env) or _eval(concept.right, objects, target, env)
    if isinstance(concept, Not):
        return not _eval(concept.body, objects, target, env)
    if isinstance(concept, Quant):
        positions = range(len(objects))
        if concept.scope == "others":
            positions = (i for i in positions if i != target)
        body = concept.body
        if concept.kind == "exists":
            return any(_eval(body, objects, target, (i,) + env) for i in positions)
        if concept.kind == "forall":
            return all(_eval(body, objects, target, (i,) + env) for i in positions)
        count = 0
        for i in positions:
            if _eval(body, objects, target, (i,) + env):
                count += 1
                if count > 1:
                    return False
        return count == 1
    if isinstance(concept, Rel):
        a = objects[_resolve(concept.left, env, target)]
        b = objects[_resolve(concept.right, env, target)]
        kind = concept.kind
        if kind == "same-color":
            return a.color == b.color
        if kind == "same-shape":
            return a.shape == b.shape
        if kind == "same-size":
            return a.size == b.size
        if kind == "size-gt":
            return a.size > b.size
        return a.size >= b.size
    if isinstance(concept, Xor):
        return _eval(concept.left, objects, target, env) != _eval(concept.right, objects, target, env)
    if isinstance(concept, Implies):
        return (not _eval(concept.left, objects, target, env)) or _eval(concept.right, objects, target, env)
    if isinstance(concept, Iff):
        return _eval(concept.left, objects, target, env) == _eval(concept.right, objects, target, env)
    if isinstance(concept, (MajorityColor, MinorityColor)):
        mine = objects[_resolve(concept.var, env, target)].color
        counts = Counter(o.color for o in objects)
        my_count = counts[mine]
        if isinstance(concept, MajorityColor):
            return all(my_count > n for color, n in counts.items() if color != mine)
        return all(my_count < n for color, n in counts.items() if color != mine)
    raise DslError(f"not a concept node: {concept!r}")


def evaluate(concept: Concept, ctx: Context) -> bool:
    """Truth value of ``concept`` for the target object of ``ctx``.

    Pure and total on well-formed inputs.
    """
    return _eval(concept, ctx.objects, ctx.target, ())
