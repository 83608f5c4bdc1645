"""Text encoders behind a common interface.

``resolve_encoder`` maps an identifier to an encoder:

* ``hash`` or ``hash:<dim>`` -- dependency-free feature-hashing encoder,
  deterministic across platforms; useful offline and in tests.
* anything else -- treated as a pretrained transformer (hub id or local
  directory, optionally prefixed ``hf:``) loaded through ``transformers``.

Encoders expose ``dim``, ``max_length`` (0 = unlimited), and
``encode_batch(texts, pooling) -> float32 array``.
"""

from __future__ import annotations

import hashlib

import numpy as np


class EncoderError(RuntimeError):
    pass


class HashEncoder:
    """Feature hashing over per-token character n-grams (n = 1..3).

    Each whitespace token is hashed into a fixed-dimension vector with
    signed buckets and L2-normalized; CLS pooling takes the first token's
    vector, MEAN pooling the average over tokens.
    """

    max_length = 0

    def __init__(self, dim: int = 64) -> None:
        if dim < 1:
            raise EncoderError(f"hash encoder dim must be >= 1, got {dim}")
        self.dim = dim

    def _token_vector(self, token: str) -> np.ndarray:
        vec = np.zeros(self.dim, dtype=np.float64)
        padded = f"^{token}$"
        for n in (1, 2, 3):
            for i in range(max(len(padded) - n + 1, 0)):
                digest = hashlib.blake2b(
                    padded[i:i + n].encode("utf-8"), digest_size=8
                ).digest()
                value = int.from_bytes(digest, "little")
                bucket = value % self.dim
                sign = 1.0 if (value >> 63) & 1 else -1.0
                vec[bucket] += sign
        norm = np.linalg.norm(vec)
        return vec / norm if norm > 0 else vec

    def encode_batch(self, texts: list[str], pooling: str) -> np.ndarray:
        rows = np.zeros((len(texts), self.dim), dtype=np.float64)
        for i, text in enumerate(texts):
            tokens = text.split()
            if not tokens:
                continue
            if pooling == "CLS":
                rows[i] = self._token_vector(tokens[0])
            else:
                rows[i] = np.mean([self._token_vector(t) for t in tokens], axis=0)
        return rows.astype(np.float32)


class TransformerEncoder:
    """Final-layer states of a pretrained transformer, CLS or masked MEAN."""

    def __init__(self, model_id: str, batch_size: int = 16) -> None:
        try:
            import torch
            from transformers import AutoModel, AutoTokenizer
        except ImportError as exc:
            raise EncoderError(
                f"encoder {model_id!r} needs the transformers extra installed: {exc}"
            ) from exc
        self._torch = torch
        try:
            self.tokenizer = AutoTokenizer.from_pretrained(model_id)
            self.model = AutoModel.from_pretrained(model_id)
        except Exception as exc:
            raise EncoderError(f"cannot load encoder {model_id!r}: {exc}") from exc
        self.model.eval()
        self.batch_size = batch_size
        self.dim = int(self.model.config.hidden_size)
        self.max_length = int(getattr(self.model.config, "max_position_embeddings", 512))
        self.truncated = 0

    def encode_batch(self, texts: list[str], pooling: str) -> np.ndarray:
        torch = self._torch
        out = np.empty((len(texts), self.dim), dtype=np.float32)
        for lo in range(0, len(texts), self.batch_size):
            chunk = texts[lo:lo + self.batch_size]
            lengths = self.tokenizer(chunk)["input_ids"]
            self.truncated += sum(len(ids) > self.max_length for ids in lengths)
            enc = self.tokenizer(
                chunk,
                return_tensors="pt",
                padding=True,
                truncation=True,
                max_length=self.max_length,
            )
            with torch.no_grad():
                hidden = self.model(**enc).last_hidden_state
            if pooling == "CLS":
                pooled = hidden[:, 0, :]
            else:
                mask = enc["attention_mask"].unsqueeze(-1).to(hidden.dtype)
                pooled = (hidden * mask).sum(dim=1) / mask.sum(dim=1).clamp(min=1)
            out[lo:lo + len(chunk)] = pooled.cpu().numpy().astype(np.float32)
        return out


def resolve_encoder(identifier: str):
    if identifier == "hash" or identifier.startswith("hash:"):
        dim = 64
        if ":" in identifier:
            try:
                dim = int(identifier.split(":", 1)[1])
            except ValueError:
                raise EncoderError(f"bad hash encoder spec {identifier!r}") from None
        return HashEncoder(dim)
    model_id = identifier.removeprefix("hf:")
    return TransformerEncoder(model_id)
