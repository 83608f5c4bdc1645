"""Bundled retrieval callbacks: raw corpus files -> AnnotatedDocuments.

Formats covered:

* ``bios-txt`` -- one ``token tag`` pair per line, blank line between
  sentences; tags follow the B/I/O/S scheme. Document text joins tokens
  with single spaces and entity spans are reconstructed from tag runs.
* ``json-list`` -- one JSON object per line with ``text``, ``entities``
  (start/end/type) and optional ``relations`` (head/tail/type).
* ``json-triples`` -- one JSON object per line with ``text`` and
  ``triples`` of head/tail spans plus a relation type.
* ``csv-entities`` -- header ``doc_id,text,start,end,type``; one entity
  per row, rows grouped by doc_id, empty offsets mean no entities.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from ..errors import PipelineError
from .schema import AnnotatedDocument, Entity, Relation


def read_bios(path: str | Path) -> list[AnnotatedDocument]:
    """Parse a BIOS-tagged token file into documents with character spans."""
    stem = Path(path).stem
    docs = []
    sentence: list[tuple[str, str]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                if sentence:
                    docs.append(_sentence_to_doc(sentence, f"{stem}-{len(docs)}"))
                    sentence = []
                continue
            parts = line.rsplit(" ", 1)
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise PipelineError(f"{path}:{lineno}: expected 'token tag', got {line!r}")
            sentence.append((parts[0], parts[1]))
    if sentence:
        docs.append(_sentence_to_doc(sentence, f"{stem}-{len(docs)}"))
    return docs


def _sentence_to_doc(pairs: list[tuple[str, str]], doc_id: str) -> AnnotatedDocument:
    tokens = [tok for tok, _ in pairs]
    starts = []
    offset = 0
    for tok in tokens:
        starts.append(offset)
        offset += len(tok) + 1
    text = " ".join(tokens)

    entities: list[Entity] = []
    open_type: str | None = None
    open_start = 0
    last_end = 0

    def close() -> None:
        nonlocal open_type
        if open_type is not None:
            entities.append(Entity(open_start, last_end, open_type))
            open_type = None

    for i, (tok, tag) in enumerate(pairs):
        tok_start, tok_end = starts[i], starts[i] + len(tok)
        if tag == "O":
            close()
        elif tag.startswith("S-"):
            close()
            entities.append(Entity(tok_start, tok_end, tag[2:]))
        elif tag.startswith("B-"):
            close()
            open_type, open_start, last_end = tag[2:], tok_start, tok_end
        elif tag.startswith("I-"):
            if open_type == tag[2:]:
                last_end = tok_end
            else:
                # dangling continuation: tolerate by opening a fresh run
                close()
                open_type, open_start, last_end = tag[2:], tok_start, tok_end
        else:
            raise PipelineError(f"doc {doc_id!r}: unknown tag {tag!r}")
    close()
    return AnnotatedDocument(doc_id, text, entities).validate()


def encode_bios(doc: AnnotatedDocument) -> list[tuple[str, str]]:
    """Inverse of :func:`read_bios` for one document: (token, tag) pairs.

    Entity spans must align with token boundaries of the space-joined text.
    """
    tokens = doc.text.split(" ")
    spans = []
    offset = 0
    for tok in tokens:
        spans.append((offset, offset + len(tok)))
        offset += len(tok) + 1
    boundary_starts = {s: i for i, (s, _) in enumerate(spans)}
    boundary_ends = {e: i for i, (_, e) in enumerate(spans)}

    tags = ["O"] * len(tokens)
    for ent in sorted(doc.entities, key=lambda e: (e.start, e.end)):
        if ent.start not in boundary_starts or ent.end not in boundary_ends:
            raise PipelineError(
                f"doc {doc.doc_id!r}: span [{ent.start}, {ent.end}) does not "
                f"align with token boundaries"
            )
        first, last = boundary_starts[ent.start], boundary_ends[ent.end]
        if any(tags[i] != "O" for i in range(first, last + 1)):
            raise PipelineError(f"doc {doc.doc_id!r}: overlapping entities cannot be tagged")
        if first == last:
            tags[first] = f"S-{ent.type}"
        else:
            tags[first] = f"B-{ent.type}"
            for i in range(first + 1, last + 1):
                tags[i] = f"I-{ent.type}"
    return list(zip(tokens, tags))


def write_bios(docs: list[AnnotatedDocument], path: str | Path) -> None:
    lines = []
    for doc in docs:
        lines.extend(f"{tok} {tag}" for tok, tag in encode_bios(doc))
        lines.append("")
    Path(path).write_text("\n".join(lines), encoding="utf-8")


def read_json_list(path: str | Path) -> list[AnnotatedDocument]:
    """One document per line: {text, entities: [...], relations: [...]}."""
    stem = Path(path).stem
    docs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                docs.append(AnnotatedDocument.from_dict(obj, doc_id=f"{stem}-{lineno}"))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise PipelineError(f"{path}:{lineno + 1}: bad record: {exc}") from exc
    return docs


def read_json_triples(path: str | Path) -> list[AnnotatedDocument]:
    """One document per line: {text, triples: [{head, tail, type}]}.

    Head and tail are entity spans {start, end, type}; unique spans become
    the entity list (in first-appearance order) and each triple becomes a
    relation over entity indices.
    """
    stem = Path(path).stem
    docs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                entities: list[Entity] = []
                index: dict[tuple, int] = {}

                def intern(span: dict) -> int:
                    ent = Entity(span["start"], span["end"], span["type"])
                    key = (ent.start, ent.end, ent.type)
                    if key not in index:
                        index[key] = len(entities)
                        entities.append(ent)
                    return index[key]

                relations = [
                    Relation(intern(t["head"]), intern(t["tail"]), t["type"])
                    for t in obj.get("triples", [])
                ]
                doc = AnnotatedDocument(
                    obj.get("doc_id", f"{stem}-{lineno}"), obj["text"], entities, relations
                )
                docs.append(doc.validate())
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise PipelineError(f"{path}:{lineno + 1}: bad record: {exc}") from exc
    return docs


def read_csv_entities(path: str | Path) -> list[AnnotatedDocument]:
    """CSV entity lists; consecutive rows with the same doc_id form one document."""
    docs: list[AnnotatedDocument] = []
    current: AnnotatedDocument | None = None
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        required = {"doc_id", "text", "start", "end", "type"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise PipelineError(f"{path}: expected header with columns {sorted(required)}")
        for row in reader:
            if current is None or row["doc_id"] != current.doc_id:
                current = AnnotatedDocument(row["doc_id"], row["text"])
                docs.append(current)
            if row["start"]:
                current.entities.append(Entity(int(row["start"]), int(row["end"]), row["type"]))
    for doc in docs:
        doc.validate(context=str(path))
    return docs


def register_builtin(registry) -> None:
    registry.register_retrieval("bios-txt", read_bios)
    registry.register_retrieval("json-list", read_json_list)
    registry.register_retrieval("json-triples", read_json_triples)
    registry.register_retrieval("csv-entities", read_csv_entities)
