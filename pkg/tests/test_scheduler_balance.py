import pytest

from kexops.errors import SchedulerError
from kexops.scheduler import (
    MachineState,
    RoundRobinDispatcher,
    TaskEnvelope,
    TaskState,
    WorkerState,
    select_machine,
)


def machines(*specs):
    return [MachineState(mid, weight, active) for mid, weight, active in specs]


class TestSelectMachine:
    def test_lowest_ratio_wins(self):
        ms = machines(("A", 4, 2), ("B", 1, 0))  # ratios 0.5 vs 0.0
        assert select_machine(ms) == "B"
        assert ms[1].active_connections == 1

    def test_tie_breaks_to_lowest_id(self):
        ms = machines(("beta", 2, 1), ("alpha", 2, 1))
        assert select_machine(ms) == "alpha"

    def test_single_machine_always_chosen(self):
        ms = machines(("only", 1, 99))
        assert select_machine(ms) == "only"
        assert ms[0].active_connections == 100

    def test_six_submits_split_four_two(self):
        ms = machines(("A", 2, 0), ("B", 1, 0))
        picks = [select_machine(ms) for _ in range(6)]
        assert picks.count("A") == 4
        assert picks.count("B") == 2

    def test_unreachable_machines_skipped(self):
        ms = machines(("A", 1, 0), ("B", 1, 5))
        ms[0].reachable = False
        assert select_machine(ms) == "B"

    def test_no_reachable_machine_is_error(self):
        ms = machines(("A", 1, 0))
        ms[0].reachable = False
        with pytest.raises(SchedulerError, match="reachable"):
            select_machine(ms)

    def test_weight_floor(self):
        with pytest.raises(SchedulerError, match="weight"):
            MachineState("A", 0)


def fresh_task(i):
    env = TaskEnvelope(task_id=f"t{i}")
    env.advance(TaskState.ASSIGNED)
    return env


class TestRoundRobin:
    def test_three_workers_five_tasks(self):
        workers = [WorkerState(f"w{i}", i) for i in range(3)]
        rr = RoundRobinDispatcher(workers)
        picks = [rr.dispatch(fresh_task(i))[0] for i in range(5)]
        assert picks == [0, 1, 2, 0, 1]

    def test_single_worker_keeps_arrival_order(self):
        workers = [WorkerState("w0", 0)]
        rr = RoundRobinDispatcher(workers)
        tasks = [fresh_task(i) for i in range(3)]
        for t in tasks:
            rr.dispatch(t)
        assert [t.task_id for t in workers[0].queue] == ["t0", "t1", "t2"]
        assert all(t.state is TaskState.QUEUED_AT_WORKER for t in tasks)

    def test_crashed_worker_skipped_and_recorded(self):
        workers = [WorkerState(f"w{i}", i) for i in range(3)]
        workers[1].crashed = True
        rr = RoundRobinDispatcher(workers)
        picks = [rr.dispatch(fresh_task(i))[0] for i in range(3)]
        assert picks == [0, 2, 0]
        assert rr.skip_log == [("t1", 1)]

    def test_all_crashed_is_error(self):
        workers = [WorkerState("w0", 0, crashed=True)]
        rr = RoundRobinDispatcher(workers)
        with pytest.raises(SchedulerError, match="crashed"):
            rr.dispatch(fresh_task(0))

    def test_rotation_ignores_queue_depth(self):
        workers = [WorkerState(f"w{i}", i) for i in range(2)]
        workers[0].queue = [fresh_task(100 + i) for i in range(5)]
        rr = RoundRobinDispatcher(workers)
        assert rr.dispatch(fresh_task(0))[0] == 0  # strict rotation, not least-loaded


class TestEnvelope:
    def test_monotone_progression_enforced(self):
        env = TaskEnvelope(task_id="t")
        env.advance(TaskState.ASSIGNED)
        env.advance(TaskState.RUNNING)
        with pytest.raises(SchedulerError, match="non-monotone"):
            env.advance(TaskState.ASSIGNED)

    def test_terminal_states_frozen(self):
        env = TaskEnvelope(task_id="t")
        env.advance(TaskState.DONE)
        with pytest.raises(SchedulerError, match="terminal"):
            env.advance(TaskState.FAILED)

    def test_round_trips_through_dict(self):
        env = TaskEnvelope(task_id="t", config={"a": 1}, assigned_machine="m")
        env.advance(TaskState.ASSIGNED)
        back = TaskEnvelope.from_dict(env.to_dict())
        assert back == env
