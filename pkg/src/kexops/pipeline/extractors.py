"""Bundled feature-extraction callbacks: AnnotatedDocument -> model input."""

from __future__ import annotations

from .readers import encode_bios
from .schema import AnnotatedDocument


def identity(doc: AnnotatedDocument) -> AnnotatedDocument:
    """Pass the unified document straight through (adapter consumes it as is)."""
    return doc


def token_label(doc: AnnotatedDocument) -> dict:
    """Token sequence plus per-token B/I/O/S tag sequence."""
    pairs = encode_bios(doc)
    return {
        "doc_id": doc.doc_id,
        "tokens": [tok for tok, _ in pairs],
        "tags": [tag for _, tag in pairs],
    }


def label_matrix(doc: AnnotatedDocument) -> dict:
    """n x n character-level label matrix.

    Entity cells fill the square block of their span; relation cells fill
    the (head-span x tail-span) block where still empty. Cells default "O".
    """
    n = len(doc.text)
    grid = [["O"] * n for _ in range(n)]
    for ent in doc.entities:
        for i in range(ent.start, ent.end):
            for j in range(ent.start, ent.end):
                grid[i][j] = ent.type
    for rel in doc.relations:
        head, tail = doc.entities[rel.head], doc.entities[rel.tail]
        for i in range(head.start, head.end):
            for j in range(tail.start, tail.end):
                if grid[i][j] == "O":
                    grid[i][j] = rel.type
    return {"doc_id": doc.doc_id, "n": n, "labels": grid}


def register_builtin(registry) -> None:
    registry.register_feature_extractor("identity", identity)
    registry.register_feature_extractor("token-label", token_label)
    registry.register_feature_extractor("matrix-nxn", label_matrix)
