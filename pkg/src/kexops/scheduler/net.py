"""Networked gateway and per-machine server.

The gateway is the service entry point: it selects a machine per task
(weighted least connections), forwards the task to that machine's server,
tracks envelopes, and receives result reports (which release the
connection count). Each AI server launches one worker thread per
configured GPU; workers block on their own FIFO queue and execute a single
task at a time through a pluggable runner.
"""

from __future__ import annotations

import json
import queue
import threading
import time
from pathlib import Path
from typing import Callable

from ..errors import SchedulerError
from .balance import RoundRobinDispatcher, select_machine
from .protocol import Address, JsonLineServer, request
from .state import MachineState, TaskEnvelope, TaskState, WorkerState

# runner(task_id, config, machine_id, worker_id) -> (status "done"|"failed", payload)
Runner = Callable[[str, dict, str, str], tuple[str, dict | None]]


class AIServer:
    """Per-machine dispatcher plus its pool of worker threads."""

    def __init__(
        self,
        machine_id: str,
        workers: int,
        runner: Runner,
        gateway_address: Address | None = None,
        host: str = "127.0.0.1",
        port: int = 0,
    ) -> None:
        if workers < 1:
            raise SchedulerError("a machine needs at least one worker")
        self.machine_id = machine_id
        self.runner = runner
        self.gateway_address = gateway_address
        self.worker_states = [WorkerState(f"{machine_id}/w{i}", i) for i in range(workers)]
        self._dispatcher = RoundRobinDispatcher(self.worker_states)
        self._queues: list[queue.Queue] = [queue.Queue() for _ in range(workers)]
        self._lock = threading.Lock()
        self._stop = threading.Event()
        self._bound = False
        self._server = JsonLineServer(host, port, self._handle)
        self._threads = [
            threading.Thread(target=self._worker_loop, args=(i,), daemon=True)
            for i in range(workers)
        ]

    @property
    def address(self) -> Address:
        return self._server.address

    def bind(self) -> "AIServer":
        """Start listening without launching workers (port becomes known)."""
        if not self._bound:
            self._server.start()
            self._bound = True
        return self

    def start(self) -> "AIServer":
        self.bind()
        for t in self._threads:
            t.start()
        if self.gateway_address is not None:
            self.send_heartbeat()
        return self

    def stop(self) -> None:
        self._stop.set()
        for q in self._queues:
            q.put(None)
        if self._bound:
            self._server.stop()
        for t in self._threads:
            if t.ident is not None:
                t.join(timeout=5)

    def send_heartbeat(self) -> None:
        assert self.gateway_address is not None
        with self._lock:
            active = sum(len(w.queue) for w in self.worker_states) + sum(
                w.busy for w in self.worker_states
            )
        request(
            self.gateway_address,
            {
                "type": "heartbeat",
                "machine_id": self.machine_id,
                "active": active,
                "weight": len(self.worker_states),
            },
        )

    def _handle(self, msg: dict) -> dict:
        if msg.get("type") == "submit_task":
            env = TaskEnvelope(task_id=msg["task_id"], config=msg.get("config", {}))
            env.advance(TaskState.ASSIGNED)
            env.assigned_machine = self.machine_id
            with self._lock:
                idx, _ = self._dispatcher.dispatch(env)
            self._queues[idx].put(env)
            return {"type": "task_ack", "task_id": env.task_id, "worker": idx}
        if msg.get("type") == "heartbeat":
            return {"type": "task_ack", "task_id": None}
        raise SchedulerError(f"unsupported message type {msg.get('type')!r}")

    def _worker_loop(self, idx: int) -> None:
        """Blocking FIFO execution; one task at a time, failures isolated."""
        state = self.worker_states[idx]
        q = self._queues[idx]
        while not self._stop.is_set():
            env = q.get()
            if env is None:
                return
            with self._lock:
                if env in state.queue:
                    state.queue.remove(env)
                state.busy = True
            try:
                status, payload = self.runner(
                    env.task_id, env.config, self.machine_id, state.worker_id
                )
                if status not in ("done", "failed"):
                    status, payload = "failed", {"error": f"bad runner status {status!r}"}
            except Exception as exc:
                status, payload = "failed", {"error": str(exc)}
            finally:
                with self._lock:
                    state.busy = False
            if self.gateway_address is not None:
                try:
                    request(
                        self.gateway_address,
                        {
                            "type": "result_report",
                            "task_id": env.task_id,
                            "status": status,
                            "machine_id": self.machine_id,
                            "worker": idx,
                            "experiment_record": payload,
                        },
                    )
                except SchedulerError:
                    pass  # gateway vanished; keep serving remaining tasks


class Gateway:
    """Entry point tracking machines, envelopes, and completed results."""

    def __init__(self, machines: list[dict], host: str = "127.0.0.1", port: int = 0) -> None:
        if not machines:
            raise SchedulerError("gateway needs at least one machine")
        self.machines: dict[str, MachineState] = {}
        self.addresses: dict[str, Address] = {}
        for m in machines:
            state = MachineState(m["machine_id"], int(m["weight"]), address=m["address"])
            host_port = m["address"].rsplit(":", 1)
            self.addresses[state.machine_id] = (host_port[0], int(host_port[1]))
            self.machines[state.machine_id] = state
        self.envelopes: dict[str, TaskEnvelope] = {}
        self.results: dict[str, dict | None] = {}
        self._lock = threading.Lock()
        self._server = JsonLineServer(host, port, self._handle)

    @property
    def address(self) -> Address:
        return self._server.address

    def start(self) -> "Gateway":
        self._server.start()
        return self

    def stop(self) -> None:
        self._server.stop()

    @classmethod
    def from_machines_file(cls, path: str | Path, host: str = "127.0.0.1", port: int = 0):
        """Machines file: JSON list of {machine_id, address, weight}."""
        machines = json.loads(Path(path).read_text())
        return cls(machines, host=host, port=port)

    # -- message handling --------------------------------------------------

    def _handle(self, msg: dict) -> dict:
        mtype = msg.get("type")
        if mtype == "submit_task":
            return self._on_submit(msg)
        if mtype == "status_query":
            env = self._get_envelope(msg["task_id"])
            return {"type": "status_reply", "envelope": env.to_dict()}
        if mtype == "result_query":
            env = self._get_envelope(msg["task_id"])
            if env.state not in (TaskState.DONE, TaskState.FAILED):
                raise SchedulerError(f"task {env.task_id!r} is still {env.state.value}")
            return {
                "type": "status_reply",
                "envelope": env.to_dict(),
                "experiment_record": self.results.get(env.task_id),
            }
        if mtype == "result_report":
            return self._on_result(msg)
        if mtype == "heartbeat":
            with self._lock:
                machine = self.machines.get(msg["machine_id"])
                if machine is not None:
                    machine.reachable = True
            return {"type": "task_ack", "task_id": None}
        raise SchedulerError(f"unsupported message type {mtype!r}")

    def _get_envelope(self, task_id: str) -> TaskEnvelope:
        with self._lock:
            if task_id not in self.envelopes:
                raise SchedulerError(f"unknown task id {task_id!r}")
            return self.envelopes[task_id]

    def _on_submit(self, msg: dict) -> dict:
        task_id = msg["task_id"]
        with self._lock:
            if task_id in self.envelopes:
                raise SchedulerError(f"duplicate task id {task_id!r}")
            env = TaskEnvelope(task_id=task_id, config=msg.get("config", {}),
                               submitted_at=time.time())
            self.envelopes[task_id] = env

        # forward to the selected machine; on connection failure try the
        # next-best machine once, then give up
        for attempt in range(2):
            with self._lock:
                try:
                    machine_id = select_machine(list(self.machines.values()))
                except SchedulerError:
                    break
            try:
                ack = request(
                    self.addresses[machine_id],
                    {"type": "submit_task", "task_id": task_id, "config": env.config},
                )
            except SchedulerError:
                with self._lock:
                    self.machines[machine_id].active_connections -= 1
                    self.machines[machine_id].reachable = False
                continue
            with self._lock:
                # a very fast worker may have reported the result already
                if env.state is TaskState.SUBMITTED:
                    env.advance(TaskState.ASSIGNED)
                    env.advance(TaskState.QUEUED_AT_WORKER)
                env.assigned_machine = machine_id
                env.assigned_worker = int(ack["worker"])
            return {"type": "task_ack", "task_id": task_id, "machine_id": machine_id,
                    "worker": ack["worker"]}
        with self._lock:
            env.advance(TaskState.FAILED)
        raise SchedulerError(f"no machine accepted task {task_id!r}")

    def _on_result(self, msg: dict) -> dict:
        with self._lock:
            env = self.envelopes.get(msg["task_id"])
            if env is None:
                raise SchedulerError(f"unknown task id {msg['task_id']!r}")
            env.advance(TaskState.DONE if msg["status"] == "done" else TaskState.FAILED)
            self.results[env.task_id] = msg.get("experiment_record")
            machine = self.machines.get(msg.get("machine_id", ""))
            if machine is not None and machine.active_connections > 0:
                machine.active_connections -= 1
        return {"type": "task_ack", "task_id": env.task_id}

    def final_states(self) -> dict[str, tuple[str, str | None, int | None]]:
        with self._lock:
            return {
                tid: (env.state.value, env.assigned_machine, env.assigned_worker)
                for tid, env in self.envelopes.items()
            }


# -- client helpers ---------------------------------------------------------------


def submit(gateway: Address, config: dict, task_id: str | None = None) -> str:
    import uuid

    task_id = task_id or f"task-{uuid.uuid4().hex[:12]}"
    request(gateway, {"type": "submit_task", "task_id": task_id, "config": config})
    return task_id


def status(gateway: Address, task_id: str) -> TaskEnvelope:
    reply = request(gateway, {"type": "status_query", "task_id": task_id})
    return TaskEnvelope.from_dict(reply["envelope"])


def result(gateway: Address, task_id: str) -> dict | None:
    reply = request(gateway, {"type": "result_query", "task_id": task_id})
    return reply.get("experiment_record")


def wait_for(gateway: Address, task_ids: list[str], timeout: float = 30.0) -> None:
    deadline = time.time() + timeout
    pending = set(task_ids)
    while pending:
        if time.time() > deadline:
            raise SchedulerError(f"timed out waiting for tasks {sorted(pending)}")
        for tid in list(pending):
            env = status(gateway, tid)
            if env.state in (TaskState.DONE, TaskState.FAILED):
                pending.discard(tid)
        if pending:
            time.sleep(0.01)


def experiment_runner(registry_root: str | Path) -> Runner:
    """Production runner: executes the task's experiment config for real."""
    from ..registry import Registry
    from ..trainer import ExperimentConfig, run_experiment

    def run(task_id: str, config: dict, machine_id: str, worker_id: str):
        registry = Registry(registry_root)
        exp_config = ExperimentConfig.from_dict(config, context=f"task {task_id}")
        result = run_experiment(
            exp_config,
            registry,
            experiment_id=f"exp-{task_id}",
            assigned_machine=machine_id,
            assigned_worker=worker_id,
        )
        status = "done" if result.record.metrics is not None else "failed"
        return status, result.record.to_dict()

    return run
