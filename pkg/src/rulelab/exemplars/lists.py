"""Exemplar lists: a rule's fixed sequence of labeled object sets.

A list holds (by default) 25 sets of one to five objects each; every object
carries the gold label obtained by evaluating the rule with that object as
target.  Generation is seeded and reproducible: equal (concept, vocab,
seed, n_sets) always produce structurally identical lists and byte-
identical persisted files.
"""

from __future__ import annotations

import json
import os
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

from ..dsl import Concept, Context, DslError, FeatureVocab, Obj, evaluate, parse_concept, print_concept


class LabelSoundnessError(DslError):
    """A persisted gold label disagrees with re-evaluating the rule."""


@dataclass(frozen=True)
class ExemplarSet:
    """One displayed set: its objects and their gold labels."""

    objects: tuple[Obj, ...]
    labels: tuple[bool, ...]

    def __post_init__(self):
        if len(self.objects) != len(self.labels):
            raise DslError("labels must align with objects")

    def context_for(self, index: int) -> Context:
        return Context(self.objects, index)


@dataclass(frozen=True)
class ExemplarList:
    rule_id: str
    source: str
    concept: Concept
    vocab: FeatureVocab
    seed: int
    sets: tuple[ExemplarSet, ...]

    @property
    def n_objects(self) -> int:
        return sum(len(s.objects) for s in self.sets)

    def iter_items(self) -> Iterator[tuple[int, int, Context, bool]]:
        """Yield (set_index, object_index, context, gold label) in
        presentation order."""
        for set_index, exemplar_set in enumerate(self.sets):
            for object_index, label in enumerate(exemplar_set.labels):
                yield set_index, object_index, exemplar_set.context_for(object_index), label


def generate_list(
    concept: Concept,
    vocab: FeatureVocab,
    seed: int,
    n_sets: int = 25,
    rule_id: str | None = None,
) -> ExemplarList:
    """Sample an exemplar list for ``concept``.

    Set sizes are uniform on 1..5 and objects are sampled uniformly with
    replacement from the object universe, so a 25-set list holds 75
    objects in expectation.
    """
    rng = random.Random(seed)
    n_sizes, n_colors, n_shapes = len(vocab.sizes), len(vocab.colors), len(vocab.shapes)
    sets = []
    for _ in range(n_sets):
        count = rng.randint(1, 5)
        objects = tuple(
            Obj(rng.randrange(n_sizes), rng.randrange(n_colors), rng.randrange(n_shapes))
            for _ in range(count)
        )
        labels = tuple(evaluate(concept, Context(objects, i)) for i in range(count))
        sets.append(ExemplarSet(objects, labels))
    source = print_concept(concept, vocab)
    return ExemplarList(
        rule_id=rule_id if rule_id is not None else source,
        source=source,
        concept=concept,
        vocab=vocab,
        seed=seed,
        sets=tuple(sets),
    )


def _list_document(exemplar_list: ExemplarList) -> dict:
    vocab = exemplar_list.vocab
    return {
        "rule_id": exemplar_list.rule_id,
        "source": exemplar_list.source,
        "vocab": {
            "sizes": list(vocab.sizes),
            "colors": list(vocab.colors),
            "shapes": list(vocab.shapes),
        },
        "seed": exemplar_list.seed,
        "sets": [
            {
                "objects": [
                    [vocab.sizes[o.size], vocab.colors[o.color], vocab.shapes[o.shape]]
                    for o in s.objects
                ],
                "labels": list(s.labels),
            }
            for s in exemplar_list.sets
        ],
    }


def write_atomic(path: str | Path, text: str) -> None:
    """Write via a sibling temp file and rename, so readers never see a
    partial document."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def save_list(exemplar_list: ExemplarList, path: str | Path) -> None:
    write_atomic(path, json.dumps(_list_document(exemplar_list), indent=2, sort_keys=True) + "\n")


def load_list(path: str | Path, verify: bool = True) -> ExemplarList:
    """Load a persisted list.

    With ``verify`` (the default), every stored gold label is re-derived
    from the rule; a mismatch raises :class:`LabelSoundnessError`.
    """
    doc = json.loads(Path(path).read_text())
    vocab = FeatureVocab(
        sizes=tuple(doc["vocab"]["sizes"]),
        colors=tuple(doc["vocab"]["colors"]),
        shapes=tuple(doc["vocab"]["shapes"]),
    )
    concept = parse_concept(doc["source"], vocab)
    sets = []
    for entry in doc["sets"]:
        objects = tuple(
            Obj(vocab.index("size", s), vocab.index("color", c), vocab.index("shape", h))
            for s, c, h in entry["objects"]
        )
        labels = tuple(bool(x) for x in entry["labels"])
        sets.append(ExemplarSet(objects, labels))
    loaded = ExemplarList(
        rule_id=doc["rule_id"],
        source=doc["source"],
        concept=concept,
        vocab=vocab,
        seed=int(doc["seed"]),
        sets=tuple(sets),
    )
    if verify:
        for set_index, object_index, ctx, label in loaded.iter_items():
            if evaluate(concept, ctx) != label:
                raise LabelSoundnessError(
                    f"{path}: stored label at set {set_index}, object {object_index} "
                    f"disagrees with the rule"
                )
    return loaded
