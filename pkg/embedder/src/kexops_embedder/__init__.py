"""Offline adapter converting text corpora into EMB1 embedding files."""

__version__ = "0.1.0"

from .embed import EmbedJob, EmbedResult, Pooling, embed_corpus
from .encoders import EncoderError, resolve_encoder

__all__ = [
    "EmbedJob",
    "EmbedResult",
    "EncoderError",
    "Pooling",
    "__version__",
    "embed_corpus",
    "resolve_encoder",
]
