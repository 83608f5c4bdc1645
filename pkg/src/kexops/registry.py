"""Durable registry of datasets, models, and experiments.

One JSONL document per record kind (``datasets.jsonl``, ``models.jsonl``,
``experiments.jsonl``) under a configurable root directory, plus an
append-only ``events.jsonl`` experiment log. The format is diffable and
survives process restarts; writes are serialized by the owning process
(single-writer, multi-reader).
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any, Iterable

from .errors import RegistryError
from .types import DatasetRecord, ExperimentRecord, ModelRecord, utc_millis

ENV_REGISTRY_ROOT = "KEXOPS_REGISTRY_ROOT"

_FILES = {
    "dataset": "datasets.jsonl",
    "model": "models.jsonl",
    "experiment": "experiments.jsonl",
}
_TYPES = {
    "dataset": DatasetRecord,
    "model": ModelRecord,
    "experiment": ExperimentRecord,
}


def default_root() -> Path:
    return Path(os.environ.get(ENV_REGISTRY_ROOT, ".kexops"))


class Registry:
    """Filesystem-backed record store keyed by (kind, id)."""

    def __init__(self, root: str | Path | None = None) -> None:
        self.root = Path(root) if root is not None else default_root()
        self.root.mkdir(parents=True, exist_ok=True)
        self._records: dict[str, dict[str, Any]] = {}
        for kind, fname in _FILES.items():
            self._records[kind] = self._load(kind, self.root / fname)

    def _load(self, kind: str, path: Path) -> dict[str, Any]:
        records: dict[str, Any] = {}
        if not path.exists():
            return records
        cls = _TYPES[kind]
        for lineno, line in enumerate(path.read_text().splitlines(), start=1):
            if not line.strip():
                continue
            try:
                rec = cls.from_dict(json.loads(line))
            except (ValueError, KeyError) as exc:
                raise RegistryError(f"{path}:{lineno}: corrupt record: {exc}") from exc
            records[rec.id] = rec
        return records

    def _flush(self, kind: str) -> None:
        path = self.root / _FILES[kind]
        tmp = path.with_suffix(".jsonl.tmp")
        lines = [
            json.dumps(self._records[kind][rid].to_dict(), sort_keys=True)
            for rid in sorted(self._records[kind])
        ]
        tmp.write_text("\n".join(lines) + ("\n" if lines else ""))
        tmp.replace(path)

    # -- generic operations ------------------------------------------------

    def put(self, kind: str, record: Any) -> None:
        if kind not in _FILES:
            raise RegistryError(f"unknown record kind {kind!r}")
        if record.id in self._records[kind]:
            raise RegistryError(f"duplicate {kind} id {record.id!r}")
        self._records[kind][record.id] = record
        self._flush(kind)

    def update(self, kind: str, record: Any) -> None:
        if kind not in _FILES:
            raise RegistryError(f"unknown record kind {kind!r}")
        if record.id not in self._records[kind]:
            raise RegistryError(f"unknown {kind} id {record.id!r}")
        self._records[kind][record.id] = record
        self._flush(kind)

    def get(self, kind: str, record_id: str) -> Any:
        try:
            return self._records[kind][record_id]
        except KeyError:
            raise RegistryError(f"unknown {kind} id {record_id!r}") from None

    def list(self, kind: str) -> list[Any]:
        if kind not in _FILES:
            raise RegistryError(f"unknown record kind {kind!r}")
        return [self._records[kind][rid] for rid in sorted(self._records[kind])]

    # -- typed conveniences --------------------------------------------------

    def put_dataset(self, record: DatasetRecord) -> None:
        self.put("dataset", record)

    def get_dataset(self, dataset_id: str) -> DatasetRecord:
        return self.get("dataset", dataset_id)

    def list_datasets(self) -> list[DatasetRecord]:
        return self.list("dataset")

    def update_dataset(self, record: DatasetRecord) -> None:
        self.update("dataset", record)

    def put_model(self, record: ModelRecord) -> None:
        self.put("model", record)

    def get_model(self, model_id: str) -> ModelRecord:
        return self.get("model", model_id)

    def list_models(self) -> list[ModelRecord]:
        return self.list("model")

    def put_experiment(self, record: ExperimentRecord) -> None:
        self.put("experiment", record)

    def get_experiment(self, experiment_id: str) -> ExperimentRecord:
        return self.get("experiment", experiment_id)

    def list_experiments(self) -> list[ExperimentRecord]:
        return self.list("experiment")

    def update_experiment(self, record: ExperimentRecord) -> None:
        self.update("experiment", record)

    def completed_experiments(self, dataset_id: str) -> list[ExperimentRecord]:
        return [
            e
            for e in self.list_experiments()
            if e.dataset_id == dataset_id and e.metrics is not None
        ]

    # -- embeddings and event log ---------------------------------------------

    def embeddings_dir(self) -> Path:
        d = self.root / "embeddings"
        d.mkdir(exist_ok=True)
        return d

    def append_event(self, experiment_id: str, event: str, payload: dict | None = None) -> None:
        line = json.dumps(
            {
                "timestamp": utc_millis(),
                "experiment_id": experiment_id,
                "event": event,
                "payload": payload or {},
            },
            sort_keys=True,
        )
        with open(self.root / "events.jsonl", "a") as fh:
            fh.write(line + "\n")

    def events(self, experiment_id: str | None = None) -> Iterable[dict]:
        path = self.root / "events.jsonl"
        if not path.exists():
            return []
        out = []
        for line in path.read_text().splitlines():
            if not line.strip():
                continue
            ev = json.loads(line)
            if experiment_id is None or ev["experiment_id"] == experiment_id:
                out.append(ev)
        return out
