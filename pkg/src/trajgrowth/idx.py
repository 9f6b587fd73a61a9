"""Reader for the IDX tensor format used by the MNIST distribution files."""
from __future__ import annotations

import gzip
import os
import struct
from pathlib import Path

import numpy as np

# type byte -> big-endian element dtype
IDX_TYPES = {
    0x08: np.dtype(">u1"),
    0x09: np.dtype(">i1"),
    0x0B: np.dtype(">i2"),
    0x0C: np.dtype(">i4"),
    0x0D: np.dtype(">f4"),
    0x0E: np.dtype(">f8"),
}

DATA_DIR_ENV = "TRAJGROWTH_DATA_DIR"
MNIST_TEST_IMAGES = "t10k-images-idx3-ubyte"


class IdxError(ValueError):
    pass


class IdxMagicError(IdxError):
    pass


class IdxTruncatedError(IdxError):
    pass


class IdxIndexError(IndexError):
    pass


def parse_idx(data: bytes) -> np.ndarray:
    if data[:2] == b"\x1f\x8b":
        data = gzip.decompress(data)
    if len(data) < 4:
        raise IdxTruncatedError(f"header needs 4 bytes, got {len(data)}")
    zero0, zero1, type_byte, ndim = data[:4]
    if zero0 or zero1 or type_byte not in IDX_TYPES or ndim == 0:
        raise IdxMagicError(f"bad magic {data[:4].hex()}")
    header = 4 + 4 * ndim
    if len(data) < header:
        raise IdxTruncatedError(f"header needs {header} bytes, got {len(data)}")
    shape = struct.unpack(f">{ndim}I", data[4:header])
    dtype = IDX_TYPES[type_byte]
    need = int(np.prod(shape, dtype=np.int64)) * dtype.itemsize
    have = len(data) - header
    if have < need:
        raise IdxTruncatedError(f"payload needs {need} bytes, got {have}")
    arr = np.frombuffer(data, dtype=dtype, count=need // dtype.itemsize, offset=header)
    return arr.reshape(shape).astype(dtype.newbyteorder("="))


def load_idx(path) -> np.ndarray:
    """Parse an IDX file (optionally gzip-compressed) into an array of its native shape."""
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise FileNotFoundError(f"cannot read IDX file {path}: {exc}") from exc
    try:
        return parse_idx(data)
    except IdxError as exc:
        raise type(exc)(f"{path}: {exc}") from None


def encode_idx(arr) -> bytes:
    arr = np.asarray(arr)
    for code, dt in IDX_TYPES.items():
        if arr.dtype.kind == dt.kind and arr.dtype.itemsize == dt.itemsize:
            break
    else:
        raise TypeError(f"no IDX type for dtype {arr.dtype}")
    head = bytes([0, 0, code, arr.ndim]) + struct.pack(f">{arr.ndim}I", *arr.shape)
    return head + arr.astype(dt).tobytes()


def mnist_point(dataset, index: int, normalize: bool = True) -> np.ndarray:
    """Image ``index`` flattened row-major to a float vector, optionally scaled to unit norm."""
    dataset = np.asarray(dataset)
    if not 0 <= index < dataset.shape[0]:
        raise IdxIndexError(f"index {index} out of range for {dataset.shape[0]} items")
    x = dataset[index].reshape(-1).astype(float)
    if normalize:
        norm = np.linalg.norm(x)
        if norm == 0:
            raise ValueError(f"item {index} is all zeros and cannot be normalised")
        x /= norm
    return x


def find_mnist(name: str = MNIST_TEST_IMAGES) -> Path:
    """Locate an MNIST file in $TRAJGROWTH_DATA_DIR (plain or .gz)."""
    base = Path(os.environ.get(DATA_DIR_ENV, "data"))
    for cand in (base / name, base / f"{name}.gz"):
        if cand.exists():
            return cand
    raise FileNotFoundError(f"{name} not found in {base} (set {DATA_DIR_ENV})")
