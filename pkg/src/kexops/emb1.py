"""EMB1: the on-disk embedding matrix format.

Layout (little-endian throughout):

=========  ====  =====================================
bytes      size  content
=========  ====  =====================================
0-3        4     ASCII magic ``EMB1``
4          1     format version, currently ``0x01``
5          1     dtype code, ``0x01`` = float32 LE
6-7        2     reserved, must be zero
8-11       4     n_rows, unsigned 32-bit
12-15      4     dim, unsigned 32-bit
16-...     n*d*4 row-major float32 payload
=========  ====  =====================================

Round-tripping a valid matrix through :func:`write_embedding` and
:func:`read_embedding` is bitwise lossless.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import EmbeddingFormatError
from .types import EmbeddingMatrix

MAGIC = b"EMB1"
VERSION = 0x01
DTYPE_FLOAT32 = 0x01
_HEADER = struct.Struct("<4sBBHII")
HEADER_SIZE = _HEADER.size  # 16 bytes


def write_embedding(matrix: EmbeddingMatrix, path: str | Path) -> None:
    """Serialize ``matrix`` to ``path`` in EMB1 format.

    The matrix invariants (finite float32 values, n_rows/dim >= 1) are
    guaranteed by EmbeddingMatrix itself; raw arrays are validated here.
    """
    if not isinstance(matrix, EmbeddingMatrix):
        matrix = EmbeddingMatrix(np.asarray(matrix))
    header = _HEADER.pack(MAGIC, VERSION, DTYPE_FLOAT32, 0, matrix.n_rows, matrix.dim)
    payload = np.ascontiguousarray(matrix.data, dtype="<f4").tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)


def read_embedding(path: str | Path) -> EmbeddingMatrix:
    """Parse an EMB1 file, validating the header and payload length."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < HEADER_SIZE:
        raise EmbeddingFormatError(f"{path}: file shorter than the {HEADER_SIZE}-byte header")
    magic, version, dtype, reserved, n_rows, dim = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise EmbeddingFormatError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise EmbeddingFormatError(f"{path}: unsupported version {version:#04x}")
    if dtype != DTYPE_FLOAT32:
        raise EmbeddingFormatError(f"{path}: unsupported dtype code {dtype:#04x}")
    if reserved != 0:
        raise EmbeddingFormatError(f"{path}: reserved header bytes must be zero, got {reserved:#06x}")
    if n_rows < 1 or dim < 1:
        raise EmbeddingFormatError(f"{path}: declared shape {n_rows}x{dim} is empty")
    expected = n_rows * dim * 4
    actual = len(raw) - HEADER_SIZE
    if actual != expected:
        raise EmbeddingFormatError(
            f"{path}: payload is {actual} bytes but header declares "
            f"{n_rows}x{dim}x4 = {expected} bytes"
        )
    data = np.frombuffer(raw, dtype="<f4", offset=HEADER_SIZE).reshape(n_rows, dim)
    if not np.isfinite(data).all():
        raise EmbeddingFormatError(f"{path}: payload contains non-finite values")
    return EmbeddingMatrix(data)
