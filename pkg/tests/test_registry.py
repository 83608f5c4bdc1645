import pytest
from hypothesis import given, strategies as st

from kexops.errors import RegistryError
from kexops.registry import Registry
from kexops.types import (
    DatasetRecord,
    ExperimentRecord,
    ExperimentStatus,
    ModelRecord,
    Task,
)

TABLE_DATASETS = ["bank", "ecommerce", "finance", "nlpcc", "renmin", "resume", "weibo"]


def test_put_then_get_returns_same_record(registry):
    rec = DatasetRecord(id="bank", name="bank", task=Task.NER, domain="finance")
    registry.put_dataset(rec)
    assert registry.get_dataset("bank") == rec


def test_duplicate_id_rejected(registry):
    registry.put_dataset(DatasetRecord(id="bank", name="bank", task=Task.NER))
    with pytest.raises(RegistryError, match="duplicate"):
        registry.put_dataset(DatasetRecord(id="bank", name="other", task=Task.NER))


def test_unknown_id_rejected(registry):
    with pytest.raises(RegistryError, match="unknown"):
        registry.get_dataset("nope")
    with pytest.raises(RegistryError, match="unknown"):
        registry.update_experiment(
            ExperimentRecord(id="e", dataset_id="d", model_id="m")
        )


def test_list_is_sorted_by_id(registry):
    for name in TABLE_DATASETS:
        registry.put_dataset(DatasetRecord(id=name, name=name, task=Task.NER))
    listed = registry.list_datasets()
    assert len(listed) == 7
    assert [r.id for r in listed] == sorted(TABLE_DATASETS)


def test_durable_across_reopen(tmp_path):
    root = tmp_path / "reg"
    first = Registry(root)
    first.put_model(ModelRecord(id="bert_span", name="span model", task=Task.NER))
    exp = ExperimentRecord(id="e1", dataset_id="bank", model_id="bert_span")
    first.put_experiment(exp)
    exp = exp.advance(ExperimentStatus.QUEUED)
    first.update_experiment(exp)

    second = Registry(root)
    assert second.get_model("bert_span").name == "span model"
    assert second.get_experiment("e1").status is ExperimentStatus.QUEUED


def test_list_count_matches_puts(registry, rng):
    k = 23
    for i in range(k):
        registry.put_model(ModelRecord(id=f"m{i:03d}", name=f"m{i}", task=Task.RE))
    assert len(registry.list_models()) == k


def test_metrics_validation():
    with pytest.raises(RegistryError, match="COMPLETED"):
        ExperimentRecord(
            id="e", dataset_id="d", model_id="m", metrics={"precision": 1, "recall": 1, "f1": 1}
        )
    with pytest.raises(RegistryError, match=r"\[0, 1\]"):
        ExperimentRecord(
            id="e",
            dataset_id="d",
            model_id="m",
            status=ExperimentStatus.COMPLETED,
            metrics={"precision": 1.2, "recall": 1, "f1": 1},
        )


def test_event_log_appends(registry):
    registry.append_event("e1", "created", {"k": 1})
    registry.append_event("e2", "created", {})
    registry.append_event("e1", "queued", {})
    evs = list(registry.events("e1"))
    assert [e["event"] for e in evs] == ["created", "queued"]
    assert all(isinstance(e["timestamp"], int) for e in evs)


_STATUSES = list(ExperimentStatus)
_LEGAL = {
    (ExperimentStatus.CREATED, ExperimentStatus.QUEUED),
    (ExperimentStatus.QUEUED, ExperimentStatus.RUNNING),
    (ExperimentStatus.RUNNING, ExperimentStatus.COMPLETED),
    (ExperimentStatus.RUNNING, ExperimentStatus.FAILED),
}


@given(st.lists(st.sampled_from(_STATUSES), min_size=1, max_size=8))
def test_status_transitions_admit_no_skips_or_backward_edges(path):
    rec = ExperimentRecord(id="e", dataset_id="d", model_id="m")
    for nxt in path:
        legal = (rec.status, nxt) in _LEGAL
        metrics = (
            {"precision": 0.5, "recall": 0.5, "f1": 0.5}
            if nxt is ExperimentStatus.COMPLETED
            else None
        )
        if legal:
            rec = rec.advance(nxt, metrics=metrics)
            assert rec.status is nxt
        else:
            with pytest.raises(RegistryError):
                rec.advance(nxt, metrics=metrics)
