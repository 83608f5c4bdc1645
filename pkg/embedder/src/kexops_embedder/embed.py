"""Corpus-to-EMB1 conversion.

One embedding row per input line, in input order. Unique texts are encoded
once and duplicates reuse the cached vector, so identical lines always
produce bitwise-identical rows regardless of encoder batching.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .emb1 import read_emb1, write_emb1
from .encoders import EncoderError, resolve_encoder


class Pooling(str, Enum):
    CLS = "CLS"
    MEAN = "MEAN"


@dataclass(frozen=True)
class EmbedJob:
    input_path: str
    output_path: str
    encoder: str = "hash"
    pooling: Pooling = Pooling.MEAN
    max_texts: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "pooling", Pooling(self.pooling))
        if self.max_texts is not None and self.max_texts < 1:
            raise ValueError(f"max_texts must be >= 1, got {self.max_texts}")


@dataclass(frozen=True)
class EmbedResult:
    rows: int
    dim: int
    truncated: int
    output_path: str


def read_corpus(path: str | Path, max_texts: int | None = None) -> list[str]:
    texts = Path(path).read_text(encoding="utf-8").splitlines()
    if max_texts is not None:
        texts = texts[:max_texts]
    if not texts:
        raise EncoderError(f"{path}: corpus is empty")
    return texts


def embed_corpus(job: EmbedJob) -> EmbedResult:
    texts = read_corpus(job.input_path, job.max_texts)
    encoder = resolve_encoder(job.encoder)

    unique = list(dict.fromkeys(texts))
    vectors = encoder.encode_batch(unique, job.pooling.value)
    by_text = {text: vectors[i] for i, text in enumerate(unique)}
    matrix = np.stack([by_text[text] for text in texts]).astype(np.float32)

    write_emb1(matrix, job.output_path)
    read_emb1(job.output_path)  # self-check against the format
    return EmbedResult(
        rows=matrix.shape[0],
        dim=matrix.shape[1],
        truncated=int(getattr(encoder, "truncated", 0)),
        output_path=str(job.output_path),
    )
