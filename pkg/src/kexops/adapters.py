"""Model adapters: the pluggable training/decoding surface of the trainer.

An adapter must provide initialize(seed) / load(path), train_step(batch)
-> loss, decode(batch) -> list[PredOutput], and save(path). Optional
capabilities (custom_train_step, custom_loss, custom_eval) are discovered
by attribute reflection and replace the trainer defaults when present.

The bundled gazetteer adapter stands in for real neural models: it
memorizes entity surfaces and entity-type pairs from training batches and
decodes by string matching, which is deterministic and converges on any
memorizable fixture.
"""

from __future__ import annotations

import json
from collections import Counter
from pathlib import Path
from typing import Protocol, Sequence, runtime_checkable

from .errors import TrainingError
from .evaluator import PredOutput, evaluate
from .pipeline.schema import AnnotatedDocument
from .types import Task

OPTIONAL_CAPABILITIES = ("custom_train_step", "custom_loss", "custom_eval")


@runtime_checkable
class ModelAdapter(Protocol):
    task: Task

    def initialize(self, seed: int) -> None: ...

    def load(self, path: str) -> None: ...

    def train_step(self, batch: Sequence[AnnotatedDocument]) -> float: ...

    def decode(self, batch: Sequence[AnnotatedDocument]) -> list[PredOutput]: ...

    def save(self, path: str) -> None: ...


def capability_flags(adapter: object) -> dict[str, bool]:
    """Reflect over the adapter for optional hook methods."""
    return {name: callable(getattr(adapter, name, None)) for name in OPTIONAL_CAPABILITIES}


ARTIFACT_FORMAT = "kexops-gazetteer/1"


class GazetteerAdapter:
    """Frequency gazetteer over entity surfaces and entity-type pairs.

    Training counts (surface -> entity type) and ((head type, tail type)
    -> relation type) occurrences; decoding emits every memorized surface
    occurrence, and for RE/JOINT every entity pair whose type pair was
    seen. The reported loss is 1 minus the running F1 over all training
    documents seen so far.
    """

    def __init__(self, task: Task) -> None:
        self.task = Task(task)
        self.seed = 0
        self.entity_counts: Counter = Counter()  # (surface, type) -> count
        self.relation_counts: Counter = Counter()  # (head_type, tail_type, rel_type) -> count
        self._seen: list[AnnotatedDocument] = []

    # -- lifecycle ---------------------------------------------------------

    def initialize(self, seed: int) -> None:
        self.seed = int(seed)
        self.entity_counts.clear()
        self.relation_counts.clear()
        self._seen = []

    def save(self, path: str) -> None:
        doc = {
            "format": ARTIFACT_FORMAT,
            "task": self.task.value,
            "seed": self.seed,
            "entity_counts": [
                [surface, etype, count]
                for (surface, etype), count in sorted(self.entity_counts.items())
            ],
            "relation_counts": [
                [list(key), count] for key, count in sorted(self.relation_counts.items())
            ],
        }
        Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True), encoding="utf-8")

    def load(self, path: str) -> None:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        if doc.get("format") != ARTIFACT_FORMAT:
            raise TrainingError(f"{path}: not a {ARTIFACT_FORMAT} artifact")
        self.task = Task(doc["task"])
        self.seed = doc["seed"]
        self.entity_counts = Counter(
            {(surface, etype): count for surface, etype, count in doc["entity_counts"]}
        )
        self.relation_counts = Counter(
            {tuple(key): count for key, count in doc["relation_counts"]}
        )
        self._seen = []

    # -- training and decoding ------------------------------------------------

    def train_step(self, batch: Sequence[AnnotatedDocument]) -> float:
        for doc in batch:
            for ent in doc.entities:
                self.entity_counts[(doc.surface(ent), ent.type)] += 1
            for rel in doc.relations:
                head, tail = doc.entities[rel.head], doc.entities[rel.tail]
                self.relation_counts[(head.type, tail.type, rel.type)] += 1
            self._seen.append(doc)
        running = evaluate(self._seen, self.decode(self._seen), self.task)
        return 1.0 - running["f1"]

    def _entity_type_for(self, surface: str) -> str | None:
        best: tuple[int, str] | None = None
        for (s, etype), count in self.entity_counts.items():
            if s != surface:
                continue
            if best is None or count > best[0] or (count == best[0] and etype < best[1]):
                best = (count, etype)
        return best[1] if best else None

    def _relation_type_for(self, head_type: str, tail_type: str) -> str | None:
        best: tuple[int, str] | None = None
        for (ht, tt, rtype), count in self.relation_counts.items():
            if (ht, tt) != (head_type, tail_type):
                continue
            if best is None or count > best[0] or (count == best[0] and rtype < best[1]):
                best = (count, rtype)
        return best[1] if best else None

    def _match_entities(self, text: str) -> set[tuple[int, int, str]]:
        found = set()
        for surface in {s for s, _ in self.entity_counts}:
            etype = self._entity_type_for(surface)
            start = text.find(surface)
            while start != -1:
                found.add((start, start + len(surface), etype))
                start = text.find(surface, start + 1)
        return found

    def decode(self, batch: Sequence[AnnotatedDocument]) -> list[PredOutput]:
        outputs = []
        for doc in batch:
            if self.task is Task.NER:
                outputs.append(PredOutput(Task.NER, entities=self._match_entities(doc.text)))
            elif self.task is Task.RE:
                pairs = set()
                for i, head in enumerate(doc.entities):
                    for j, tail in enumerate(doc.entities):
                        if i == j:
                            continue
                        rtype = self._relation_type_for(head.type, tail.type)
                        if rtype is not None:
                            pairs.add((i, j, rtype))
                outputs.append(PredOutput(Task.RE, relations=pairs))
            else:
                entities = self._match_entities(doc.text)
                septuplets = set()
                for hs, he, ht in entities:
                    for ts, te, tt in entities:
                        if (hs, he) == (ts, te):
                            continue
                        rtype = self._relation_type_for(ht, tt)
                        if rtype is not None:
                            septuplets.add((hs, he, ht, ts, te, tt, rtype))
                outputs.append(PredOutput(Task.JOINT, entities=entities, relations=septuplets))
        return outputs


class CustomEvalGazetteer(GazetteerAdapter):
    """Gazetteer variant exposing the optional evaluation hook."""

    def custom_eval(self, docs: Sequence[AnnotatedDocument]) -> dict[str, float]:
        metrics = evaluate(docs, self.decode(docs), self.task)
        metrics = dict(metrics)
        return metrics


def toy_adapter(task: Task) -> GazetteerAdapter:
    return GazetteerAdapter(task)


ADAPTER_FACTORIES = {
    "toy": toy_adapter,
    "toy-custom-eval": lambda task: CustomEvalGazetteer(task),
}


def resolve_adapter(name: str | None, task: Task) -> GazetteerAdapter:
    factory = ADAPTER_FACTORIES.get(name or "toy")
    if factory is None:
        raise TrainingError(f"no adapter factory registered under {name!r}")
    return factory(task)
