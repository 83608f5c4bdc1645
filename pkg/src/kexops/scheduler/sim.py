"""Deterministic discrete-event simulation of the scheduling pipeline.

Virtual time replaces wall-clock execution: task arrivals flow through
gateway selection, round-robin dispatch, and FIFO worker execution exactly
as in the networked mode, and identical inputs always produce identical
event logs. The log records a machine-state snapshot at every selection so
the balancing decision can be re-checked externally.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from ..errors import SchedulerError
from .balance import RoundRobinDispatcher, select_machine
from .state import MachineState, TaskEnvelope, TaskState, WorkerState


@dataclass(frozen=True)
class SimMachine:
    machine_id: str
    weight: int  # GPU count
    workers: int | None = None  # defaults to one worker per GPU
    crashed_workers: frozenset = frozenset()

    @property
    def worker_count(self) -> int:
        return self.workers if self.workers is not None else self.weight


@dataclass(frozen=True)
class SimTask:
    task_id: str
    arrival: float = 0.0
    duration: float = 1.0
    fails: bool = False


@dataclass
class SimResult:
    events: list[dict]
    envelopes: dict[str, TaskEnvelope]
    machines: dict[str, MachineState]

    def final_states(self) -> dict[str, tuple[str, str | None, int | None]]:
        return {
            tid: (env.state.value, env.assigned_machine, env.assigned_worker)
            for tid, env in self.envelopes.items()
        }


class _Sim:
    def __init__(self, machines: list[SimMachine]) -> None:
        if not machines:
            raise SchedulerError("cluster spec has no machines")
        self.machines: dict[str, MachineState] = {}
        self.dispatchers: dict[str, RoundRobinDispatcher] = {}
        self.workers: dict[str, list[WorkerState]] = {}
        for spec in machines:
            if spec.machine_id in self.machines:
                raise SchedulerError(f"duplicate machine id {spec.machine_id!r}")
            self.machines[spec.machine_id] = MachineState(spec.machine_id, spec.weight)
            pool = [
                WorkerState(
                    worker_id=f"{spec.machine_id}/w{i}",
                    gpu_index=i,
                    crashed=i in spec.crashed_workers,
                )
                for i in range(spec.worker_count)
            ]
            self.workers[spec.machine_id] = pool
            self.dispatchers[spec.machine_id] = RoundRobinDispatcher(pool)
        self.events: list[dict] = []
        self.envelopes: dict[str, TaskEnvelope] = {}
        self._queue: list[tuple[float, int, str, tuple]] = []
        self._seq = 0
        self._durations: dict[str, float] = {}
        self._fails: dict[str, bool] = {}

    def push(self, time: float, kind: str, payload: tuple) -> None:
        heapq.heappush(self._queue, (time, self._seq, kind, payload))
        self._seq += 1

    def log(self, time: float, event: str, **fields) -> None:
        self.events.append({"time": time, "event": event, **fields})

    def run(self, trace: list[SimTask]) -> SimResult:
        for task in trace:
            if task.duration < 0:
                raise SchedulerError(f"task {task.task_id!r}: negative duration")
            if task.task_id in self._durations:
                raise SchedulerError(f"duplicate task id {task.task_id!r}")
            self._durations[task.task_id] = task.duration
            self._fails[task.task_id] = task.fails
            self.push(task.arrival, "arrival", (task.task_id,))
        while self._queue:
            time, _, kind, payload = heapq.heappop(self._queue)
            if kind == "arrival":
                self._on_arrival(time, *payload)
            else:
                self._on_complete(time, *payload)
        return SimResult(self.events, self.envelopes, self.machines)

    def _on_arrival(self, time: float, task_id: str) -> None:
        env = TaskEnvelope(task_id=task_id, submitted_at=time)
        self.envelopes[task_id] = env
        self.log(time, "task_submitted", task_id=task_id)

        snapshot = [
            [m.machine_id, m.active_connections, m.weight]
            for m in self.machines.values()
        ]
        machine_id = select_machine(list(self.machines.values()))
        env.advance(TaskState.ASSIGNED)
        env.assigned_machine = machine_id
        self.log(time, "machine_selected", task_id=task_id, machine_id=machine_id,
                 snapshot=sorted(snapshot))

        idx, skipped = self.dispatchers[machine_id].dispatch(env)
        self.log(time, "worker_assigned", task_id=task_id, machine_id=machine_id,
                 worker=idx, skipped=skipped)
        self._maybe_start(time, machine_id, idx)

    def _maybe_start(self, time: float, machine_id: str, worker_idx: int) -> None:
        worker = self.workers[machine_id][worker_idx]
        if worker.busy or not worker.queue:
            return
        env = worker.queue.pop(0)
        worker.busy = True
        env.advance(TaskState.RUNNING)
        self.log(time, "task_started", task_id=env.task_id, machine_id=machine_id,
                 worker=worker_idx)
        self.push(time + self._durations[env.task_id], "complete",
                  (env.task_id, machine_id, worker_idx))

    def _on_complete(self, time: float, task_id: str, machine_id: str, worker_idx: int) -> None:
        env = self.envelopes[task_id]
        status = TaskState.FAILED if self._fails[task_id] else TaskState.DONE
        env.advance(status)
        self.log(time, "task_finished", task_id=task_id, machine_id=machine_id,
                 worker=worker_idx, status=status.value)
        self.machines[machine_id].active_connections -= 1
        worker = self.workers[machine_id][worker_idx]
        worker.busy = False
        self._maybe_start(time, machine_id, worker_idx)


def simulate(machines: list[SimMachine], trace: list[SimTask], seed: int = 0) -> SimResult:
    """Run the whole gateway -> server -> worker pipeline in virtual time.

    ``seed`` is part of the interface for trace generators; the simulation
    itself is fully determined by its inputs.
    """
    del seed
    return _Sim(machines).run(list(trace))
