"""Micro-averaged exact-match scoring of standardized model outputs.

Items are task-specific: NER scores (start, end, type) triples, RE scores
(head index, tail index, relation type), and JOINT pools entity triplets
with relation septuplets (head span+type, tail span+type, relation type).
Conventions: precision is 0 with no predictions, recall is 0 with no gold
items, F1 is 0 when both are 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import TrainingError
from .pipeline.schema import AnnotatedDocument
from .types import Task


@dataclass(frozen=True)
class PredOutput:
    """Standardized decoded output for one document."""

    task: Task
    entities: frozenset = field(default_factory=frozenset)  # (start, end, type)
    relations: frozenset = field(default_factory=frozenset)  # RE pairs or septuplets

    def __post_init__(self) -> None:
        object.__setattr__(self, "task", Task(self.task))
        object.__setattr__(self, "entities", frozenset(self.entities))
        object.__setattr__(self, "relations", frozenset(self.relations))
        for start, end, _ in self.entities:
            if start < 0 or end <= start:
                raise TrainingError(f"invalid predicted span [{start}, {end})")
        if self.task is Task.JOINT:
            for item in self.relations:
                hs, he, _, ts, te, _, _ = item
                if hs < 0 or he <= hs or ts < 0 or te <= ts:
                    raise TrainingError(f"invalid septuplet spans in {item}")


def gold_items(doc: AnnotatedDocument, task: Task) -> set:
    """The scoreable item set of one gold document under a task."""
    task = Task(task)
    entities = {(e.start, e.end, e.type) for e in doc.entities}
    if task is Task.NER:
        return entities
    if task is Task.RE:
        return {(r.head, r.tail, r.type) for r in doc.relations}
    septuplets = set()
    for r in doc.relations:
        head, tail = doc.entities[r.head], doc.entities[r.tail]
        septuplets.add(
            (head.start, head.end, head.type, tail.start, tail.end, tail.type, r.type)
        )
    return {("ent", *e) for e in entities} | {("rel", *s) for s in septuplets}


def pred_items(pred: PredOutput) -> set:
    if pred.task is Task.NER:
        return set(pred.entities)
    if pred.task is Task.RE:
        return set(pred.relations)
    return {("ent", *e) for e in pred.entities} | {("rel", *s) for s in pred.relations}


def evaluate(
    gold: Sequence[AnnotatedDocument],
    pred: Iterable[PredOutput],
    task: Task,
) -> dict[str, float]:
    """Micro P/R/F1 over documents aligned by position."""
    task = Task(task)
    pred = list(pred)
    if len(gold) != len(pred):
        raise TrainingError(f"{len(gold)} gold documents but {len(pred)} predictions")
    tp = fp = fn = 0
    for doc, p in zip(gold, pred):
        if p.task is not task:
            raise TrainingError(f"prediction task {p.task.value} != evaluation task {task.value}")
        g_items = gold_items(doc, task)
        p_items = pred_items(p)
        tp += len(g_items & p_items)
        fp += len(p_items - g_items)
        fn += len(g_items - p_items)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return {"precision": precision, "recall": recall, "f1": f1}
