"""Scheduler state: machines, workers, and task envelopes."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from ..errors import SchedulerError


class TaskState(str, Enum):
    SUBMITTED = "SUBMITTED"
    ASSIGNED = "ASSIGNED"
    QUEUED_AT_WORKER = "QUEUED_AT_WORKER"
    RUNNING = "RUNNING"
    DONE = "DONE"
    FAILED = "FAILED"


_ORDER = {state: i for i, state in enumerate(TaskState)}


@dataclass
class TaskEnvelope:
    task_id: str
    config: dict[str, Any] = field(default_factory=dict)
    submitted_at: float = 0.0
    state: TaskState = TaskState.SUBMITTED
    assigned_machine: str | None = None
    assigned_worker: int | None = None

    def advance(self, state: TaskState) -> None:
        state = TaskState(state)
        if _ORDER[state] <= _ORDER[self.state]:
            raise SchedulerError(
                f"task {self.task_id!r}: non-monotone transition "
                f"{self.state.value} -> {state.value}"
            )
        if self.state in (TaskState.DONE, TaskState.FAILED):
            raise SchedulerError(f"task {self.task_id!r} already terminal")
        self.state = state

    def to_dict(self) -> dict:
        return {
            "task_id": self.task_id,
            "config": dict(self.config),
            "submitted_at": self.submitted_at,
            "state": self.state.value,
            "assigned_machine": self.assigned_machine,
            "assigned_worker": self.assigned_worker,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TaskEnvelope":
        return cls(
            task_id=d["task_id"],
            config=dict(d.get("config", {})),
            submitted_at=d.get("submitted_at", 0.0),
            state=TaskState(d["state"]),
            assigned_machine=d.get("assigned_machine"),
            assigned_worker=d.get("assigned_worker"),
        )


@dataclass
class MachineState:
    machine_id: str
    weight: int  # GPU count, used as the load-balancing weight
    active_connections: int = 0
    address: str = ""
    reachable: bool = True

    def __post_init__(self) -> None:
        if self.weight < 1:
            raise SchedulerError(f"machine {self.machine_id!r}: weight must be >= 1")
        if self.active_connections < 0:
            raise SchedulerError(f"machine {self.machine_id!r}: negative connections")

    @property
    def load_ratio(self) -> float:
        return self.active_connections / self.weight


@dataclass
class WorkerState:
    worker_id: str
    gpu_index: int
    queue: list[TaskEnvelope] = field(default_factory=list)
    busy: bool = False
    crashed: bool = False
