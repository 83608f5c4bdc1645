"""ModelOps toolkit for knowledge-extraction workloads.

Subsystems:

* :mod:`kexops.types` / :mod:`kexops.emb1` / :mod:`kexops.registry` --
  domain records, the EMB1 embedding file format, durable registry.
* :mod:`kexops.metrics` -- distributional similarity between embedding
  matrices (MMD, Frechet distance, PRD max-F1, Mauve) plus the
  subsampling protocol.
* :mod:`kexops.ranking` / :mod:`kexops.recommender` -- rank-sum-ratio
  fusion and historical-model recommendation.
* :mod:`kexops.pipeline` -- three-layer callback dataset adaptation.
* :mod:`kexops.evaluator` / :mod:`kexops.adapters` / :mod:`kexops.trainer`
  -- automated training/evaluation over pluggable model adapters.
* :mod:`kexops.scheduler` -- gateway/server/worker task scheduling, with
  a discrete-event simulation harness and a networked mode.
* :mod:`kexops.cli` -- the ``kexops`` command-line entry point.
"""

__version__ = "0.1.0"

from .errors import (
    EmbeddingFormatError,
    KexopsError,
    MetricError,
    NoRecommendationError,
    PipelineError,
    RegistryError,
    SchedulerError,
    TrainingError,
)
from .types import (
    DatasetRecord,
    EmbeddingMatrix,
    ExperimentRecord,
    ExperimentStatus,
    ModelRecord,
    Task,
)

__all__ = [
    "DatasetRecord",
    "EmbeddingFormatError",
    "EmbeddingMatrix",
    "ExperimentRecord",
    "ExperimentStatus",
    "KexopsError",
    "MetricError",
    "ModelRecord",
    "NoRecommendationError",
    "PipelineError",
    "RegistryError",
    "SchedulerError",
    "Task",
    "TrainingError",
    "__version__",
]
