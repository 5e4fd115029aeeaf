"""SWDF binary array container and the 2D CSV convenience loader.

Layout: magic ``SWDF``, u32 version (=1), u32 ndim, ndim x u64 extents,
u8 dtype (0 = real float64, 1 = complex float64 interleaved re,im),
u8 normalization mode, then the payload row-major little-endian. Real
payloads are promoted to complex on load. Non-finite values are
rejected at ingestion.
"""

from __future__ import annotations

import math
import struct
from pathlib import Path

import numpy as np

from .core import ContainerError, NORMALIZATION_MODES

MAGIC = b"SWDF"
VERSION = 1
DTYPE_REAL = 0
DTYPE_COMPLEX = 1

_HEADER_FIXED = struct.Struct("<4sII")

_NORM_TO_BYTE = {mode: i for i, mode in enumerate(NORMALIZATION_MODES)}
_BYTE_TO_NORM = {i: mode for mode, i in _NORM_TO_BYTE.items()}


def write_swdf(path, array, normalization: str = "none") -> None:
    """Write an array to an SWDF container.

    Real float arrays are stored as dtype 0, anything complex as dtype 1.
    """
    if normalization not in _NORM_TO_BYTE:
        raise ContainerError(f"unknown normalization mode {normalization!r}")
    arr = np.asarray(array)
    if np.iscomplexobj(arr):
        payload = np.ascontiguousarray(arr, dtype="<c16")
        dtype_byte = DTYPE_COMPLEX
    else:
        payload = np.ascontiguousarray(arr, dtype="<f8")
        dtype_byte = DTYPE_REAL
    header = _HEADER_FIXED.pack(MAGIC, VERSION, arr.ndim)
    header += struct.pack(f"<{arr.ndim}Q", *arr.shape)
    header += struct.pack("<BB", dtype_byte, _NORM_TO_BYTE[normalization])
    Path(path).write_bytes(header + payload.tobytes())


def read_swdf(path) -> tuple[np.ndarray, str]:
    """Read an SWDF container; returns (complex array, normalization mode)."""
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER_FIXED.size:
        raise ContainerError(f"{path}: truncated header")
    magic, version, ndim = _HEADER_FIXED.unpack_from(raw, 0)
    if magic != MAGIC:
        raise ContainerError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise ContainerError(f"{path}: unsupported version {version}")
    off = _HEADER_FIXED.size
    if len(raw) < off + 8 * ndim + 2:
        raise ContainerError(f"{path}: truncated extents")
    extents = struct.unpack_from(f"<{ndim}Q", raw, off)
    off += 8 * ndim
    dtype_byte, norm_byte = struct.unpack_from("<BB", raw, off)
    off += 2
    if dtype_byte not in (DTYPE_REAL, DTYPE_COMPLEX):
        raise ContainerError(f"{path}: unknown dtype byte {dtype_byte}")
    if norm_byte not in _BYTE_TO_NORM:
        raise ContainerError(f"{path}: unknown normalization byte {norm_byte}")
    count = math.prod(extents)
    itemsize = 16 if dtype_byte == DTYPE_COMPLEX else 8
    if len(raw) - off != count * itemsize:
        raise ContainerError(
            f"{path}: payload is {len(raw) - off} bytes, expected {count * itemsize}"
        )
    dt = "<c16" if dtype_byte == DTYPE_COMPLEX else "<f8"
    flat = np.frombuffer(raw, dtype=dt, count=count, offset=off)
    if not np.all(np.isfinite(flat.view(np.float64) if dtype_byte else flat)):
        raise ContainerError(f"{path}: non-finite values in payload")
    arr = flat.reshape(extents).astype(np.complex128)
    return arr, _BYTE_TO_NORM[norm_byte]


def read_csv_2d(path) -> np.ndarray:
    """Load a 2D real CSV matrix (comma separated, one row per line)."""
    try:
        arr = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    except ValueError as exc:
        raise ContainerError(f"{path}: {exc}") from exc
    if arr.ndim != 2:
        raise ContainerError(f"{path}: expected a 2D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ContainerError(f"{path}: non-finite values in CSV")
    return arr
