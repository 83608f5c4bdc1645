"""Automated experiment execution.

``run_experiment`` drives the full workflow: parse and validate the
configuration, load or initialize the model adapter, build the data loader
through the pipeline callbacks, discover optional adapter hooks by
reflection, then run the epoch loop with an evaluation after every epoch.
Status transitions, per-epoch history, and hook usage are recorded in the
registry's event log; the trained artifact is saved beside the registry.
"""

from __future__ import annotations

import json
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from .adapters import capability_flags, resolve_adapter
from .errors import TrainingError
from .evaluator import evaluate
from .pipeline import CallbackRegistry, PipelineSpec, build_loader
from .registry import Registry
from .types import ExperimentRecord, ExperimentStatus


@dataclass
class ExperimentConfig:
    dataset_id: str
    model_id: str
    hyperparams: dict[str, Any] = field(default_factory=dict)
    desired_metric: str = "f1"
    resume_from: str | None = None

    def __post_init__(self) -> None:
        if self.epochs < 1:
            raise TrainingError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise TrainingError(f"batch_size must be >= 1, got {self.batch_size}")

    @property
    def epochs(self) -> int:
        return int(self.hyperparams.get("epochs", 1))

    @property
    def batch_size(self) -> int:
        return int(self.hyperparams.get("batch_size", 8))

    @property
    def seed(self) -> int:
        return int(self.hyperparams.get("seed", 0))

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentConfig":
        """Parse a YAML (reference) or JSON configuration file."""
        text = Path(path).read_text(encoding="utf-8")
        try:
            data = yaml.safe_load(text)  # YAML is a JSON superset
        except yaml.YAMLError as exc:
            raise TrainingError(f"{path}: cannot parse config: {exc}") from exc
        if not isinstance(data, dict):
            raise TrainingError(f"{path}: config must be a mapping")
        return cls.from_dict(data, context=str(path))

    @classmethod
    def from_dict(cls, data: dict, context: str = "config") -> "ExperimentConfig":
        missing = {"dataset_id", "model_id"} - set(data)
        if missing:
            raise TrainingError(f"{context}: missing keys {sorted(missing)}")
        return cls(
            dataset_id=data["dataset_id"],
            model_id=data["model_id"],
            hyperparams=dict(data.get("hyperparams", {})),
            desired_metric=data.get("desired_metric", "f1"),
            resume_from=data.get("resume_from"),
        )

    def to_dict(self) -> dict:
        return {
            "dataset_id": self.dataset_id,
            "model_id": self.model_id,
            "hyperparams": dict(self.hyperparams),
            "desired_metric": self.desired_metric,
            "resume_from": self.resume_from,
        }


@dataclass
class RunResult:
    record: ExperimentRecord
    history: list[dict[str, float]]
    losses: list[float]
    hook_flags: dict[str, bool]
    artifact_path: str | None
    initial_metrics: dict[str, float] | None = None
    error: str | None = None


def _validate_config(config: ExperimentConfig, registry: Registry) -> None:
    dataset = registry.get_dataset(config.dataset_id)
    model = registry.get_model(config.model_id)
    if dataset.task is not model.task:
        raise TrainingError(
            f"task mismatch: dataset {dataset.id!r} is {dataset.task.value} "
            f"but model {model.id!r} is {model.task.value}"
        )
    if config.resume_from and not Path(config.resume_from).exists():
        raise TrainingError(f"resume_from artifact {config.resume_from!r} does not exist")


def run_experiment(
    config: ExperimentConfig,
    registry: Registry,
    callbacks: CallbackRegistry | None = None,
    experiment_id: str | None = None,
    assigned_machine: str | None = None,
    assigned_worker: str | None = None,
) -> RunResult:
    """Execute one experiment end to end; adapter failures yield a FAILED record."""
    # reject config problems before anything is enqueued
    _validate_config(config, registry)
    dataset = registry.get_dataset(config.dataset_id)
    model = registry.get_model(config.model_id)

    exp_id = experiment_id or f"exp-{uuid.uuid4().hex[:12]}"
    record = ExperimentRecord(
        id=exp_id,
        dataset_id=config.dataset_id,
        model_id=config.model_id,
        hyperparams=dict(config.hyperparams),
        assigned_machine=assigned_machine,
        assigned_worker=assigned_worker,
    )
    registry.put_experiment(record)
    registry.append_event(exp_id, "created", {"config": config.to_dict()})

    record = record.advance(ExperimentStatus.QUEUED)
    registry.update_experiment(record)
    registry.append_event(exp_id, "queued", {})

    record = record.advance(ExperimentStatus.RUNNING)
    registry.update_experiment(record)
    registry.append_event(exp_id, "running", {})

    history: list[dict[str, float]] = []
    losses: list[float] = []
    hook_flags: dict[str, bool] = {}
    initial_metrics: dict[str, float] | None = None
    artifact_path = registry.root / "artifacts" / f"{exp_id}.model.json"

    try:
        adapter = resolve_adapter(model.adapter, model.task)
        if config.resume_from:
            adapter.load(config.resume_from)
            registry.append_event(exp_id, "model_loaded", {"path": config.resume_from})
        else:
            adapter.initialize(config.seed)
            registry.append_event(exp_id, "model_initialized", {"seed": config.seed})

        loader = build_loader(
            registry,
            config.dataset_id,
            config.model_id,
            PipelineSpec(batch_size=config.batch_size),
            seed=config.seed,
            callbacks=callbacks,
        )
        registry.append_event(exp_id, "loader_built", {"documents": len(loader.documents)})

        hook_flags = capability_flags(adapter)
        registry.append_event(exp_id, "capabilities_checked", hook_flags)

        def run_eval() -> dict[str, float]:
            if hook_flags["custom_eval"]:
                return adapter.custom_eval(loader.documents)
            preds = []
            for batch in loader.eval_batches():
                preds.extend(adapter.decode(batch))
            return evaluate(loader.documents, preds, dataset.task)

        if config.resume_from:
            initial_metrics = run_eval()
            registry.append_event(exp_id, "initial_eval", initial_metrics)

        for epoch in range(config.epochs):
            for batch in loader:
                if hook_flags["custom_train_step"]:
                    loss = adapter.custom_train_step(batch)
                else:
                    loss = adapter.train_step(batch)
                if hook_flags["custom_loss"]:
                    loss = adapter.custom_loss(batch, loss)
                losses.append(float(loss))
            metrics = run_eval()
            history.append(metrics)
            registry.append_event(
                exp_id, "epoch_eval", {"epoch": epoch, **metrics}
            )

        artifact_path.parent.mkdir(exist_ok=True)
        adapter.save(str(artifact_path))
        registry.append_event(exp_id, "artifact_saved", {"path": str(artifact_path)})

        record = record.advance(ExperimentStatus.COMPLETED, metrics=history[-1])
        registry.update_experiment(record)
        registry.append_event(exp_id, "completed", history[-1])
        return RunResult(
            record, history, losses, hook_flags, str(artifact_path), initial_metrics
        )
    except Exception as exc:  # adapter or pipeline failure -> FAILED, captured
        record = record.advance(ExperimentStatus.FAILED)
        registry.update_experiment(record)
        registry.append_event(exp_id, "failed", {"error": str(exc)})
        return RunResult(record, history, losses, hook_flags, None, initial_metrics, str(exc))


def config_to_yaml(config: ExperimentConfig) -> str:
    return yaml.safe_dump(config.to_dict(), sort_keys=True)


def config_to_json(config: ExperimentConfig) -> str:
    return json.dumps(config.to_dict(), sort_keys=True)
