"""Three-layer callback pipeline adapting datasets to model input formats."""

from .callbacks import CallbackRegistry, default_registry
from .cleaners import apply_cleaners, normalize_whitespace, validate_spans
from .extractors import identity, label_matrix, token_label
from .loader import DataLoader, PipelineSpec, build_loader
from .readers import (
    encode_bios,
    read_bios,
    read_csv_entities,
    read_json_list,
    read_json_triples,
    write_bios,
)
from .schema import AnnotatedDocument, Entity, Relation

__all__ = [
    "AnnotatedDocument",
    "CallbackRegistry",
    "DataLoader",
    "Entity",
    "PipelineSpec",
    "Relation",
    "apply_cleaners",
    "build_loader",
    "default_registry",
    "encode_bios",
    "identity",
    "label_matrix",
    "normalize_whitespace",
    "read_bios",
    "read_csv_entities",
    "read_json_list",
    "read_json_triples",
    "token_label",
    "validate_spans",
    "write_bios",
]
