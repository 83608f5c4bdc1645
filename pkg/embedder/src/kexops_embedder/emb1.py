"""Minimal EMB1 writer/reader implementing the interchange format.

Layout: 4-byte ASCII magic ``EMB1``, version byte 0x01, dtype byte 0x01
(float32 LE), two zero reserved bytes, then n_rows and dim as unsigned
32-bit LE, followed by the row-major float32 payload.
"""

from __future__ import annotations

import os
import struct
import tempfile
from pathlib import Path

import numpy as np

MAGIC = b"EMB1"
VERSION = 0x01
DTYPE_FLOAT32 = 0x01
_HEADER = struct.Struct("<4sBBHII")


class Emb1Error(ValueError):
    pass


def write_emb1(data: np.ndarray, path: str | Path) -> None:
    """Atomically write a 2-D float32 array as an EMB1 file."""
    arr = np.ascontiguousarray(data, dtype="<f4")
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise Emb1Error(f"need a non-empty 2-D matrix, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise Emb1Error("refusing to write non-finite values")
    path = Path(path)
    header = _HEADER.pack(MAGIC, VERSION, DTYPE_FLOAT32, 0, arr.shape[0], arr.shape[1])
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", suffix=".emb1.tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(header)
            fh.write(arr.tobytes())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_emb1(path: str | Path) -> np.ndarray:
    """Validating reader, used to check our own output against the format."""
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise Emb1Error(f"{path}: shorter than the header")
    magic, version, dtype, reserved, n_rows, dim = _HEADER.unpack_from(raw)
    if magic != MAGIC or version != VERSION or dtype != DTYPE_FLOAT32 or reserved != 0:
        raise Emb1Error(f"{path}: bad header")
    if len(raw) - _HEADER.size != n_rows * dim * 4:
        raise Emb1Error(f"{path}: payload length mismatch")
    data = np.frombuffer(raw, dtype="<f4", offset=_HEADER.size).reshape(n_rows, dim)
    if not np.isfinite(data).all():
        raise Emb1Error(f"{path}: non-finite payload")
    return data
