"""Named callback registration for the three pipeline layers.

Retrieval callbacks read raw files into AnnotatedDocuments (one per
dataset format), cleaners transform documents, and feature extractors turn
documents into model input records (one per model family). Integrating N
datasets and M models therefore needs N + M registered callbacks, not NxM
conversion scripts.
"""

from __future__ import annotations

from typing import Callable, Iterable

from ..errors import PipelineError
from .schema import AnnotatedDocument

RetrievalFn = Callable[[str], Iterable[AnnotatedDocument]]
CleanerFn = Callable[[AnnotatedDocument], AnnotatedDocument]
ExtractorFn = Callable[[AnnotatedDocument], object]


class CallbackRegistry:
    """Holds the named callbacks for one deployment."""

    def __init__(self) -> None:
        self._retrievals: dict[str, RetrievalFn] = {}
        self._cleaners: dict[str, CleanerFn] = {}
        self._extractors: dict[str, ExtractorFn] = {}

    @staticmethod
    def _register(table: dict, layer: str, name: str, fn) -> None:
        if name in table:
            raise PipelineError(f"{layer} callback {name!r} is already registered")
        table[name] = fn

    def register_retrieval(self, name: str, fn: RetrievalFn) -> None:
        self._register(self._retrievals, "retrieval", name, fn)

    def register_cleaner(self, name: str, fn: CleanerFn) -> None:
        self._register(self._cleaners, "cleaner", name, fn)

    def register_feature_extractor(self, name: str, fn: ExtractorFn) -> None:
        self._register(self._extractors, "feature extractor", name, fn)

    @staticmethod
    def _resolve(table: dict, layer: str, name: str):
        try:
            return table[name]
        except KeyError:
            raise PipelineError(f"no {layer} callback registered under {name!r}") from None

    def retrieval(self, name: str) -> RetrievalFn:
        return self._resolve(self._retrievals, "retrieval", name)

    def cleaner(self, name: str) -> CleanerFn:
        return self._resolve(self._cleaners, "cleaner", name)

    def feature_extractor(self, name: str) -> ExtractorFn:
        return self._resolve(self._extractors, "feature extractor", name)

    def counts(self) -> dict[str, int]:
        return {
            "retrieval": len(self._retrievals),
            "cleaner": len(self._cleaners),
            "feature_extractor": len(self._extractors),
        }


_default: CallbackRegistry | None = None


def default_registry() -> CallbackRegistry:
    """Process-wide registry preloaded with the bundled callbacks."""
    global _default
    if _default is None:
        _default = CallbackRegistry()
        from . import cleaners, extractors, readers

        readers.register_builtin(_default)
        cleaners.register_builtin(_default)
        extractors.register_builtin(_default)
    return _default
