"""Domain types: embedding matrices, registry records, lifecycle enums."""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any

import numpy as np

from .errors import RegistryError


def utc_millis() -> int:
    """Current UTC time as integer milliseconds since the epoch."""
    return time.time_ns() // 1_000_000


class Task(str, Enum):
    NER = "NER"
    RE = "RE"
    JOINT = "JOINT"


class ExperimentStatus(str, Enum):
    CREATED = "CREATED"
    QUEUED = "QUEUED"
    RUNNING = "RUNNING"
    COMPLETED = "COMPLETED"
    FAILED = "FAILED"


# Legal lifecycle edges; anything else is a skipped or backward transition.
_STATUS_EDGES = {
    ExperimentStatus.CREATED: {ExperimentStatus.QUEUED},
    ExperimentStatus.QUEUED: {ExperimentStatus.RUNNING},
    ExperimentStatus.RUNNING: {ExperimentStatus.COMPLETED, ExperimentStatus.FAILED},
    ExperimentStatus.COMPLETED: set(),
    ExperimentStatus.FAILED: set(),
}

METRIC_NAMES = ("precision", "recall", "f1")


class EmbeddingMatrix:
    """An n_rows x dim matrix of float32 text embeddings.

    Values are validated to be finite at construction and the backing
    array is frozen, so instances are safe to share across threads.
    """

    __slots__ = ("data", "source_model_id")

    def __init__(self, data: np.ndarray, source_model_id: str = "") -> None:
        arr = np.ascontiguousarray(data, dtype=np.float32)
        if arr.ndim != 2:
            raise ValueError(f"embedding matrix must be 2-D, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"embedding matrix must be at least 1x1, got {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("embedding matrix contains non-finite values")
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)
        object.__setattr__(self, "source_model_id", source_model_id)

    def __setattr__(self, name: str, value: Any) -> None:
        raise AttributeError("EmbeddingMatrix is immutable")

    @property
    def n_rows(self) -> int:
        return int(self.data.shape[0])

    @property
    def dim(self) -> int:
        return int(self.data.shape[1])

    def take_rows(self, indices: np.ndarray) -> "EmbeddingMatrix":
        return EmbeddingMatrix(self.data[np.asarray(indices)], self.source_model_id)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EmbeddingMatrix):
            return NotImplemented
        return (
            self.source_model_id == other.source_model_id
            and self.data.shape == other.data.shape
            and bool(np.array_equal(self.data, other.data))
        )

    def __repr__(self) -> str:
        return f"EmbeddingMatrix({self.n_rows}x{self.dim}, source={self.source_model_id!r})"


def as_matrix(x: "EmbeddingMatrix | np.ndarray") -> np.ndarray:
    """Accept either an EmbeddingMatrix or a raw 2-D array; return float64 data."""
    data = x.data if isinstance(x, EmbeddingMatrix) else np.asarray(x)
    if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-D sample matrix, got shape {data.shape}")
    return np.asarray(data, dtype=np.float64)


@dataclass
class DatasetRecord:
    id: str
    name: str
    task: Task
    domain: str = "general"
    embedding_ref: str | None = None
    corpus_ref: str | None = None
    # Pipeline binding: name of the registered retrieval callback for this dataset.
    reader: str | None = None

    def __post_init__(self) -> None:
        self.task = Task(self.task)
        if not self.id:
            raise RegistryError("dataset id must be non-empty")

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "name": self.name,
            "task": self.task.value,
            "domain": self.domain,
            "embedding_ref": self.embedding_ref,
            "corpus_ref": self.corpus_ref,
            "reader": self.reader,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "DatasetRecord":
        return cls(
            id=d["id"],
            name=d.get("name", d["id"]),
            task=Task(d["task"]),
            domain=d.get("domain", "general"),
            embedding_ref=d.get("embedding_ref"),
            corpus_ref=d.get("corpus_ref"),
            reader=d.get("reader"),
        )


@dataclass
class ModelRecord:
    id: str
    name: str
    task: Task
    version: str = "0"
    # Pipeline/trainer bindings: feature extractor callback and adapter factory names.
    feature_extractor: str | None = None
    adapter: str | None = None

    def __post_init__(self) -> None:
        self.task = Task(self.task)
        if not self.id:
            raise RegistryError("model id must be non-empty")

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "name": self.name,
            "task": self.task.value,
            "version": self.version,
            "feature_extractor": self.feature_extractor,
            "adapter": self.adapter,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ModelRecord":
        return cls(
            id=d["id"],
            name=d.get("name", d["id"]),
            task=Task(d["task"]),
            version=d.get("version", "0"),
            feature_extractor=d.get("feature_extractor"),
            adapter=d.get("adapter"),
        )


def _validate_metrics(metrics: dict[str, float]) -> dict[str, float]:
    out = {}
    for key in METRIC_NAMES:
        if key not in metrics:
            raise RegistryError(f"metrics must contain {key!r}")
        v = float(metrics[key])
        if not 0.0 <= v <= 1.0:
            raise RegistryError(f"metric {key}={v} outside [0, 1]")
        out[key] = v
    return out


@dataclass
class ExperimentRecord:
    """One tracked training+evaluation run of a model on a dataset.

    ``metrics`` is present exactly when status is COMPLETED, and the status
    only advances along CREATED -> QUEUED -> RUNNING -> {COMPLETED, FAILED}.
    """

    id: str
    dataset_id: str
    model_id: str
    hyperparams: dict[str, Any] = field(default_factory=dict)
    status: ExperimentStatus = ExperimentStatus.CREATED
    metrics: dict[str, float] | None = None
    created_at: int = field(default_factory=utc_millis)
    finished_at: int | None = None
    assigned_machine: str | None = None
    assigned_worker: str | None = None

    def __post_init__(self) -> None:
        self.status = ExperimentStatus(self.status)
        if not self.id:
            raise RegistryError("experiment id must be non-empty")
        if (self.metrics is not None) != (self.status is ExperimentStatus.COMPLETED):
            raise RegistryError(
                f"metrics must be present iff status is COMPLETED "
                f"(status={self.status.value}, metrics={'set' if self.metrics else 'absent'})"
            )
        if self.metrics is not None:
            self.metrics = _validate_metrics(self.metrics)

    def advance(
        self,
        status: ExperimentStatus,
        metrics: dict[str, float] | None = None,
        when: int | None = None,
    ) -> "ExperimentRecord":
        """Return a copy advanced to ``status``, enforcing the lifecycle graph."""
        status = ExperimentStatus(status)
        if status not in _STATUS_EDGES[self.status]:
            raise RegistryError(
                f"illegal status transition {self.status.value} -> {status.value}"
            )
        if status is ExperimentStatus.COMPLETED:
            if metrics is None:
                raise RegistryError("COMPLETED requires metrics")
        elif metrics is not None:
            raise RegistryError(f"metrics not allowed when advancing to {status.value}")
        finished = self.finished_at
        if status in (ExperimentStatus.COMPLETED, ExperimentStatus.FAILED):
            finished = utc_millis() if when is None else when
        return replace(self, status=status, metrics=metrics, finished_at=finished)

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "dataset_id": self.dataset_id,
            "model_id": self.model_id,
            "hyperparams": dict(self.hyperparams),
            "status": self.status.value,
            "metrics": dict(self.metrics) if self.metrics is not None else None,
            "created_at": self.created_at,
            "finished_at": self.finished_at,
            "assigned_machine": self.assigned_machine,
            "assigned_worker": self.assigned_worker,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ExperimentRecord":
        return cls(
            id=d["id"],
            dataset_id=d["dataset_id"],
            model_id=d["model_id"],
            hyperparams=dict(d.get("hyperparams", {})),
            status=ExperimentStatus(d["status"]),
            metrics=d.get("metrics"),
            created_at=d.get("created_at", 0),
            finished_at=d.get("finished_at"),
            assigned_machine=d.get("assigned_machine"),
            assigned_worker=d.get("assigned_worker"),
        )
