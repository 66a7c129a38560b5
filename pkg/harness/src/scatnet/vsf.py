"""Reader/writer for the solver's binary array format.

Little-endian: magic "VSF1", u32 rank, u32 dims[2], then float64 (re, im)
pairs row-major. Implemented here independently so this package depends
only on the file format, not on the solver's code.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"VSF1"
HEADER_BYTES = 16


def read_array(path: str | Path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < HEADER_BYTES or raw[:4] != MAGIC:
        raise ValueError(f"{path}: not a VSF1 file")
    rank, d0, d1 = struct.unpack("<III", raw[4:HEADER_BYTES])
    if rank not in (1, 2):
        raise ValueError(f"{path}: unsupported rank {rank}")
    if len(raw) != HEADER_BYTES + 16 * d0 * d1:
        raise ValueError(f"{path}: truncated payload")
    arr = np.frombuffer(raw[HEADER_BYTES:], dtype="<c16").astype(np.complex128)
    return arr.reshape(d0, d1) if rank == 2 else arr


def write_array(path: str | Path, arr: np.ndarray) -> None:
    arr = np.asarray(arr)
    if arr.ndim not in (1, 2):
        raise ValueError(f"rank must be 1 or 2, got {arr.ndim}")
    d0 = arr.shape[0]
    d1 = arr.shape[1] if arr.ndim == 2 else 1
    header = MAGIC + struct.pack("<III", arr.ndim, d0, d1)
    payload = np.ascontiguousarray(arr, dtype="<c16").tobytes()
    Path(path).write_bytes(header + payload)
