"""Batch loader wiring retrieval -> cleaners -> feature extraction.

The retrieval callback comes from the dataset record, the feature extractor
from the model record (overridable through the PipelineSpec), so any
registered (dataset, model) pair loads without pair-specific code.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from ..errors import PipelineError
from ..registry import Registry
from .callbacks import CallbackRegistry, default_registry
from .cleaners import apply_cleaners
from .schema import AnnotatedDocument


@dataclass(frozen=True)
class PipelineSpec:
    retrieval: str | None = None  # None: resolve from the dataset record
    cleaners: tuple[str, ...] = ()
    feature_extractor: str | None = None  # None: resolve from the model record
    batch_size: int = 32
    shuffle: bool = False

    def __post_init__(self) -> None:
        if self.batch_size < 1:
            raise PipelineError(f"batch_size must be >= 1, got {self.batch_size}")
        object.__setattr__(self, "cleaners", tuple(self.cleaners))


class DataLoader:
    """Iterates extracted records in batches of at most ``batch_size``.

    Iteration order is deterministic for a given seed; each full pass
    reshuffles (when enabled) with a per-epoch substream. ``documents``
    exposes the cleaned gold documents in stable order for evaluation.
    """

    def __init__(
        self,
        documents: list[AnnotatedDocument],
        records: list,
        batch_size: int,
        shuffle: bool,
        seed: int,
    ) -> None:
        self.documents = documents
        self._records = records
        self.batch_size = batch_size
        self._shuffle = shuffle
        self._seed = seed
        self._epoch = 0

    def __len__(self) -> int:
        return (len(self._records) + self.batch_size - 1) // self.batch_size

    def __iter__(self) -> Iterator[list]:
        order = np.arange(len(self._records))
        if self._shuffle:
            rng = np.random.default_rng(np.random.SeedSequence(self._seed).spawn(self._epoch + 1)[-1])
            rng.shuffle(order)
        self._epoch += 1
        for lo in range(0, len(order), self.batch_size):
            yield [self._records[i] for i in order[lo:lo + self.batch_size]]

    def eval_batches(self) -> Iterator[list]:
        """Unshuffled batches aligned with ``documents`` order."""
        for lo in range(0, len(self._records), self.batch_size):
            yield self._records[lo:lo + self.batch_size]


def build_loader(
    registry: Registry,
    dataset_id: str,
    model_id: str,
    spec: PipelineSpec | None = None,
    seed: int = 0,
    callbacks: CallbackRegistry | None = None,
) -> DataLoader:
    """Assemble the three-layer pipeline for a (dataset, model) pair."""
    spec = spec or PipelineSpec()
    callbacks = callbacks or default_registry()
    dataset = registry.get_dataset(dataset_id)
    model = registry.get_model(model_id)

    retrieval_name = spec.retrieval or dataset.reader
    if not retrieval_name:
        raise PipelineError(f"dataset {dataset_id!r} has no retrieval callback bound")
    extractor_name = spec.feature_extractor or model.feature_extractor
    if not extractor_name:
        raise PipelineError(f"model {model_id!r} has no feature extractor bound")
    retrieval = callbacks.retrieval(retrieval_name)
    extractor = callbacks.feature_extractor(extractor_name)
    if not dataset.corpus_ref:
        raise PipelineError(f"dataset {dataset_id!r} has no corpus file")

    try:
        raw_docs = list(retrieval(dataset.corpus_ref))
    except PipelineError:
        raise
    except Exception as exc:
        raise PipelineError(
            f"retrieval {retrieval_name!r} failed on {dataset.corpus_ref}: {exc}"
        ) from exc

    documents: list[AnnotatedDocument] = []
    records: list = []
    for doc in raw_docs:
        doc.validate(context=f"retrieval {retrieval_name!r}")
        cleaned = apply_cleaners(doc, spec.cleaners, callbacks)
        try:
            records.append(extractor(cleaned))
        except PipelineError:
            raise
        except Exception as exc:
            raise PipelineError(
                f"extractor {extractor_name!r} failed on doc {doc.doc_id!r}: {exc}"
            ) from exc
        documents.append(cleaned)
    return DataLoader(documents, records, spec.batch_size, spec.shuffle, seed)
