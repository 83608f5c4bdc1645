"""Unified intermediate document schema.

Every dataset is read into AnnotatedDocument records (text plus
character-offset entity spans and entity-index relations) so model-specific
feature extraction can be written once against this shape.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import PipelineError


@dataclass(frozen=True)
class Entity:
    start: int  # inclusive character offset
    end: int  # exclusive character offset
    type: str

    def to_dict(self) -> dict:
        return {"start": self.start, "end": self.end, "type": self.type}


@dataclass(frozen=True)
class Relation:
    head: int  # index into the document's entity list
    tail: int
    type: str

    def to_dict(self) -> dict:
        return {"head": self.head, "tail": self.tail, "type": self.type}


@dataclass
class AnnotatedDocument:
    doc_id: str
    text: str
    entities: list[Entity] = field(default_factory=list)
    relations: list[Relation] = field(default_factory=list)

    def validate(self, context: str = "") -> "AnnotatedDocument":
        """Check span and relation-index invariants; raise naming the context."""
        where = f"{context}: " if context else ""
        for ent in self.entities:
            if not (0 <= ent.start < ent.end <= len(self.text)):
                raise PipelineError(
                    f"{where}doc {self.doc_id!r}: invalid span "
                    f"[{ent.start}, {ent.end}) for text of length {len(self.text)}"
                )
        n = len(self.entities)
        for rel in self.relations:
            if not (0 <= rel.head < n and 0 <= rel.tail < n):
                raise PipelineError(
                    f"{where}doc {self.doc_id!r}: relation references entity "
                    f"({rel.head}, {rel.tail}) outside 0..{n - 1}"
                )
        return self

    def surface(self, entity: Entity) -> str:
        return self.text[entity.start:entity.end]

    def to_dict(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "text": self.text,
            "entities": [e.to_dict() for e in self.entities],
            "relations": [r.to_dict() for r in self.relations],
        }

    @classmethod
    def from_dict(cls, d: dict, doc_id: str | None = None) -> "AnnotatedDocument":
        return cls(
            doc_id=d.get("doc_id", doc_id or ""),
            text=d["text"],
            entities=[Entity(e["start"], e["end"], e["type"]) for e in d.get("entities", [])],
            relations=[Relation(r["head"], r["tail"], r["type"]) for r in d.get("relations", [])],
        ).validate()
