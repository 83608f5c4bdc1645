import pytest

from kexops.errors import TrainingError
from kexops.evaluator import PredOutput, evaluate, gold_items
from kexops.pipeline import AnnotatedDocument, Entity, Relation
from kexops.types import Task


def ner_doc(doc_id, text, spans):
    return AnnotatedDocument(doc_id, text, [Entity(s, e, t) for s, e, t in spans])


def test_exact_match_scores_one():
    doc = ner_doc("d", "aspirin treats headache", [(0, 7, "DRUG"), (15, 23, "DISEASE")])
    pred = PredOutput(Task.NER, entities={(0, 7, "DRUG"), (15, 23, "DISEASE")})
    assert evaluate([doc], [pred], Task.NER) == {"precision": 1.0, "recall": 1.0, "f1": 1.0}


def test_half_right_scores_half():
    doc = ner_doc("d", "aspirin treats headache", [(0, 7, "DRUG"), (15, 23, "DISEASE")])
    pred = PredOutput(Task.NER, entities={(0, 7, "DRUG"), (8, 14, "DISEASE")})
    got = evaluate([doc], [pred], Task.NER)
    assert got == {"precision": 0.5, "recall": 0.5, "f1": 0.5}


def test_empty_predictions_score_zero():
    doc = ner_doc("d", "aspirin", [(0, 7, "DRUG")])
    got = evaluate([doc], [PredOutput(Task.NER)], Task.NER)
    assert got == {"precision": 0.0, "recall": 0.0, "f1": 0.0}


def test_no_gold_items_scores_zero_recall():
    doc = ner_doc("d", "nothing here", [])
    pred = PredOutput(Task.NER, entities={(0, 7, "DRUG")})
    got = evaluate([doc], [pred], Task.NER)
    assert got["recall"] == 0.0 and got["precision"] == 0.0 and got["f1"] == 0.0


def test_type_must_match_not_just_span():
    doc = ner_doc("d", "aspirin", [(0, 7, "DRUG")])
    pred = PredOutput(Task.NER, entities={(0, 7, "DISEASE")})
    assert evaluate([doc], [pred], Task.NER)["f1"] == 0.0


def test_relation_pairs_scored_for_re():
    doc = AnnotatedDocument(
        "d",
        "aspirin treats headache",
        [Entity(0, 7, "DRUG"), Entity(15, 23, "DISEASE")],
        [Relation(0, 1, "treats")],
    )
    hit = PredOutput(Task.RE, relations={(0, 1, "treats")})
    miss = PredOutput(Task.RE, relations={(1, 0, "treats")})
    assert evaluate([doc], [hit], Task.RE)["f1"] == 1.0
    assert evaluate([doc], [miss], Task.RE)["f1"] == 0.0


def test_joint_pools_triplets_and_septuplets():
    doc = AnnotatedDocument(
        "d",
        "aspirin treats headache",
        [Entity(0, 7, "DRUG"), Entity(15, 23, "DISEASE")],
        [Relation(0, 1, "treats")],
    )
    items = gold_items(doc, Task.JOINT)
    assert ("ent", 0, 7, "DRUG") in items
    assert ("rel", 0, 7, "DRUG", 15, 23, "DISEASE", "treats") in items
    full = PredOutput(
        Task.JOINT,
        entities={(0, 7, "DRUG"), (15, 23, "DISEASE")},
        relations={(0, 7, "DRUG", 15, 23, "DISEASE", "treats")},
    )
    assert evaluate([doc], [full], Task.JOINT)["f1"] == 1.0
    entities_only = PredOutput(Task.JOINT, entities={(0, 7, "DRUG"), (15, 23, "DISEASE")})
    got = evaluate([doc], [entities_only], Task.JOINT)
    assert got["precision"] == 1.0
    assert got["recall"] == pytest.approx(2 / 3)


def test_permutation_invariance(rng):
    docs = [
        ner_doc(f"d{i}", "aspirin treats headache", [(0, 7, "DRUG")]) for i in range(6)
    ]
    preds = [
        PredOutput(Task.NER, entities={(0, 7, "DRUG")} if i % 2 else set())
        for i in range(6)
    ]
    base = evaluate(docs, preds, Task.NER)
    order = rng.permutation(6)
    shuffled = evaluate([docs[i] for i in order], [preds[i] for i in order], Task.NER)
    assert base == shuffled


def test_micro_average_additivity():
    docs_a = [ner_doc("a", "aspirin treats", [(0, 7, "DRUG")])]
    preds_a = [PredOutput(Task.NER, entities={(0, 7, "DRUG"), (8, 14, "X")})]
    docs_b = [ner_doc("b", "fever and chills", [(0, 5, "SYM"), (10, 16, "SYM")])]
    preds_b = [PredOutput(Task.NER, entities={(0, 5, "SYM")})]

    # tp/fp/fn sums: a -> (1, 1, 0), b -> (1, 0, 1); combined (2, 1, 1)
    combined = evaluate(docs_a + docs_b, preds_a + preds_b, Task.NER)
    assert combined["precision"] == pytest.approx(2 / 3)
    assert combined["recall"] == pytest.approx(2 / 3)


def test_task_mismatch_rejected():
    doc = ner_doc("d", "aspirin", [(0, 7, "DRUG")])
    with pytest.raises(TrainingError, match="task"):
        evaluate([doc], [PredOutput(Task.RE)], Task.NER)


def test_misaligned_lengths_rejected():
    doc = ner_doc("d", "aspirin", [])
    with pytest.raises(TrainingError, match="predictions"):
        evaluate([doc], [], Task.NER)


def test_invalid_predicted_span_rejected():
    with pytest.raises(TrainingError, match="span"):
        PredOutput(Task.NER, entities={(5, 5, "X")})
