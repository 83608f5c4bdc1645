import numpy as np
import pytest

from kexops.registry import Registry
from kexops.types import DatasetRecord, EmbeddingMatrix, ModelRecord, Task


@pytest.fixture
def registry(tmp_path):
    return Registry(tmp_path / "registry")


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def gaussian_matrix(rng, n, dim, shift=0.0, scale=1.0):
    return EmbeddingMatrix(rng.normal(loc=shift, scale=scale, size=(n, dim)))


@pytest.fixture
def seeded_pair(rng):
    """Two disjoint halves of one synthetic corpus plus a shifted variant."""
    base = rng.normal(size=(800, 8))
    return (
        EmbeddingMatrix(base[:400]),
        EmbeddingMatrix(base[400:]),
        EmbeddingMatrix(base[400:] + 2.0),
    )


def generate_bios_sentences(rng, n_sentences, types=("PER", "LOC", "ORG", "DRUG")):
    """Well-formed BIOS sentences: single-token entities are S-, longer runs B-/I-."""
    letters = "abcdefghijklmnopqrstuvwxyz"
    sentences = []
    for _ in range(n_sentences):
        n_tokens = int(rng.integers(3, 11))
        tokens = [
            "".join(rng.choice(list(letters), size=int(rng.integers(2, 7))))
            for _ in range(n_tokens)
        ]
        tags = ["O"] * n_tokens
        i = 0
        while i < n_tokens:
            if rng.random() < 0.35:
                span = int(rng.integers(1, min(3, n_tokens - i) + 1))
                etype = str(rng.choice(list(types)))
                if span == 1:
                    tags[i] = f"S-{etype}"
                else:
                    tags[i] = f"B-{etype}"
                    for j in range(i + 1, i + span):
                        tags[j] = f"I-{etype}"
                i += span
            else:
                i += 1
        sentences.append(list(zip(tokens, tags)))
    return sentences


def write_bios_file(path, sentences):
    lines = []
    for sentence in sentences:
        lines.extend(f"{tok} {tag}" for tok, tag in sentence)
        lines.append("")
    path.write_text("\n".join(lines), encoding="utf-8")


def make_dataset(registry, dataset_id, task=Task.NER, **kwargs):
    rec = DatasetRecord(id=dataset_id, name=dataset_id, task=task, **kwargs)
    registry.put_dataset(rec)
    return rec


def make_model(registry, model_id, task=Task.NER, **kwargs):
    rec = ModelRecord(id=model_id, name=model_id, task=task, **kwargs)
    registry.put_model(rec)
    return rec
