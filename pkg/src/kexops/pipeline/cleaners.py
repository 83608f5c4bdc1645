"""Bundled cleaning callbacks.

Cleaners that mutate text must remap entity offsets so spans stay valid;
``apply_cleaners`` re-validates after every step and names the offending
cleaner on failure.
"""

from __future__ import annotations

from typing import Iterable

from ..errors import PipelineError
from .schema import AnnotatedDocument, Entity


def normalize_whitespace(doc: AnnotatedDocument) -> AnnotatedDocument:
    """Collapse whitespace runs to single spaces and strip the ends.

    Entity offsets are remapped through a per-character position table, so
    a span keeps covering the same visible characters.
    """
    text = doc.text
    new_chars: list[str] = []
    position = [0] * (len(text) + 1)  # old offset -> new offset of that char
    prev_space = True  # strips leading whitespace
    for i, ch in enumerate(text):
        if ch.isspace():
            if not prev_space:
                new_chars.append(" ")
            position[i] = len(new_chars) - 1 if new_chars else 0
            prev_space = True
        else:
            position[i] = len(new_chars)
            new_chars.append(ch)
            prev_space = False
    # drop a trailing space left by trailing whitespace
    if new_chars and new_chars[-1] == " ":
        new_chars.pop()
    new_text = "".join(new_chars)
    position[len(text)] = len(new_text)

    entities = []
    for ent in doc.entities:
        start = min(position[ent.start], len(new_text))
        end = min(position[ent.end - 1] + 1, len(new_text))
        entities.append(Entity(start, end, ent.type))
    return AnnotatedDocument(doc.doc_id, new_text, entities, list(doc.relations))


def validate_spans(doc: AnnotatedDocument) -> AnnotatedDocument:
    """No-op cleaner that fails fast on invalid documents."""
    return doc.validate()


def apply_cleaners(
    doc: AnnotatedDocument, cleaners: Iterable, callbacks=None
) -> AnnotatedDocument:
    """Run cleaners in order; each step must leave spans valid.

    ``cleaners`` may mix registered names (resolved through ``callbacks``)
    and plain callables.
    """
    for cleaner in cleaners:
        if isinstance(cleaner, str):
            if callbacks is None:
                raise PipelineError(f"cleaner {cleaner!r} given by name but no registry supplied")
            name, fn = cleaner, callbacks.cleaner(cleaner)
        else:
            name, fn = getattr(cleaner, "__name__", repr(cleaner)), cleaner
        doc = fn(doc)
        doc.validate(context=f"cleaner {name!r}")
    return doc


def register_builtin(registry) -> None:
    registry.register_cleaner("normalize-whitespace", normalize_whitespace)
    registry.register_cleaner("validate-spans", validate_spans)
