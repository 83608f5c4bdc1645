"""Distributed experiment scheduling: gateway, per-machine servers, workers."""

from .balance import RoundRobinDispatcher, select_machine
from .net import AIServer, Gateway, experiment_runner, result, status, submit, wait_for
from .sim import SimMachine, SimResult, SimTask, simulate
from .state import MachineState, TaskEnvelope, TaskState, WorkerState

__all__ = [
    "AIServer",
    "Gateway",
    "MachineState",
    "RoundRobinDispatcher",
    "SimMachine",
    "SimResult",
    "SimTask",
    "TaskEnvelope",
    "TaskState",
    "WorkerState",
    "experiment_runner",
    "result",
    "select_machine",
    "simulate",
    "status",
    "submit",
    "wait_for",
]
