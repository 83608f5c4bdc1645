import pytest


@pytest.fixture
def corpus(tmp_path):
    lines = [
        "aspirin relieves mild pain",
        "ibuprofen reduces inflammation",
        "insulin regulates blood sugar",
        "the patient reported dizziness",
        "no adverse events were observed",
        "aspirin relieves mild pain",  # duplicate of line 1
        "dosage was increased gradually",
        "symptoms improved within days",
        "follow-up scheduled next month",
        "treatment was well tolerated",
    ]
    path = tmp_path / "corpus.txt"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


@pytest.fixture(scope="session")
def tiny_transformer(tmp_path_factory):
    """Randomly initialized local transformer checkpoint (no network)."""
    torch = pytest.importorskip("torch")
    transformers = pytest.importorskip("transformers")

    target = tmp_path_factory.mktemp("tiny-model")
    vocab = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"] + list(
        "abcdefghijklmnopqrstuvwxyz-"
    )
    vocab_file = target / "vocab.txt"
    vocab_file.write_text("\n".join(vocab), encoding="utf-8")
    tokenizer = transformers.BertTokenizer(vocab_file=str(vocab_file))
    config = transformers.BertConfig(
        vocab_size=len(vocab),
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=48,
    )
    torch.manual_seed(1234)
    model = transformers.BertModel(config)
    model.save_pretrained(target)
    tokenizer.save_pretrained(target)
    return str(target)
