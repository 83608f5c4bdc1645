"""Machine selection and per-machine worker dispatch.

The gateway picks the machine minimizing active_connections / weight
(weighted least connections, ties to the lowest machine id) and holds the
connection until the task finishes. Each machine's server hands tasks to
its workers in strict round-robin order regardless of queue depth, since
per-task GPU memory is unpredictable and workers run one task at a time.
"""

from __future__ import annotations

from typing import Sequence

from ..errors import SchedulerError
from .state import MachineState, TaskEnvelope, TaskState, WorkerState


def select_machine(machines: Sequence[MachineState]) -> str:
    """Weighted-least-connections choice; increments the winner's connections."""
    reachable = [m for m in machines if m.reachable]
    if not reachable:
        raise SchedulerError("no reachable machine")
    chosen = min(reachable, key=lambda m: (m.load_ratio, m.machine_id))
    chosen.active_connections += 1
    return chosen.machine_id


class RoundRobinDispatcher:
    """Strict rotation over a machine's workers, skipping crashed ones."""

    def __init__(self, workers: Sequence[WorkerState]) -> None:
        if not workers:
            raise SchedulerError("a machine needs at least one worker")
        self.workers = list(workers)
        self._next = 0
        self.skip_log: list[tuple[str, int]] = []  # (task_id, skipped worker index)

    def dispatch(self, task: TaskEnvelope) -> tuple[int, list[int]]:
        """Queue the task on the next live worker; returns (index, skipped)."""
        skipped: list[int] = []
        for _ in range(len(self.workers)):
            idx = self._next
            self._next = (self._next + 1) % len(self.workers)
            worker = self.workers[idx]
            if worker.crashed:
                skipped.append(idx)
                self.skip_log.append((task.task_id, idx))
                continue
            worker.queue.append(task)
            task.advance(TaskState.QUEUED_AT_WORKER)
            task.assigned_worker = idx
            return idx, skipped
        raise SchedulerError("all workers have crashed")
