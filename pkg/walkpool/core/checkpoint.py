# walkpool/core/checkpoint.py
"""
Checkpoint container for named float64 tensors.

Layout (all integers little-endian):

    magic      4 bytes  b"WPCK"
    version    u16      currently 1
    meta_len   u32      length of the metadata block
    metadata   bytes    UTF-8 JSON, sorted keys, compact separators
    count      u32      number of tensors
    per tensor:
        name_len u16, name UTF-8
        ndim     u8,  dims u64 * ndim
        data     float64 '<f8', row-major

Nothing time- or host-dependent is written, so equal inputs give equal bytes.
"""
import json
import logging
import struct
from collections import OrderedDict
from pathlib import Path
from typing import Any, Dict, Mapping, Tuple, Union

import numpy as np

from .errors import CheckpointError, LoadError

logger = logging.getLogger(__name__)

MAGIC = b"WPCK"
VERSION = 1


def encode_checkpoint(tensors: Mapping[str, np.ndarray], metadata: Mapping[str, Any]) -> bytes:
    meta = json.dumps(dict(metadata), sort_keys=True, separators=(",", ":")).encode("utf-8")
    chunks = [MAGIC, struct.pack("<HI", VERSION, len(meta)), meta, struct.pack("<I", len(tensors))]
    for name, arr in tensors.items():
        arr = np.asarray(arr, dtype="<f8")
        raw_name = name.encode("utf-8")
        chunks.append(struct.pack("<H", len(raw_name)))
        chunks.append(raw_name)
        chunks.append(struct.pack("<B", arr.ndim))
        chunks.append(struct.pack(f"<{arr.ndim}Q", *arr.shape))
        chunks.append(arr.tobytes(order="C"))
    return b"".join(chunks)


def decode_checkpoint(blob: bytes) -> Tuple["OrderedDict[str, np.ndarray]", Dict[str, Any]]:
    view = memoryview(blob)
    pos = 0

    def take(n: int) -> memoryview:
        nonlocal pos
        if pos + n > len(view):
            raise CheckpointError(f"truncated checkpoint at byte {pos}")
        out = view[pos:pos + n]
        pos += n
        return out

    if bytes(take(4)) != MAGIC:
        raise CheckpointError("not a walkpool checkpoint (bad magic)")
    version, meta_len = struct.unpack("<HI", take(6))
    if version != VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}")
    try:
        metadata = json.loads(bytes(take(meta_len)).decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointError(f"corrupt checkpoint metadata: {e}") from e

    (count,) = struct.unpack("<I", take(4))
    tensors: "OrderedDict[str, np.ndarray]" = OrderedDict()
    for _ in range(count):
        (name_len,) = struct.unpack("<H", take(2))
        name = bytes(take(name_len)).decode("utf-8")
        (ndim,) = struct.unpack("<B", take(1))
        shape = struct.unpack(f"<{ndim}Q", take(8 * ndim)) if ndim else ()
        size = int(np.prod(shape)) if ndim else 1
        data = np.frombuffer(bytes(take(8 * size)), dtype="<f8").astype(np.float64)
        tensors[name] = data.reshape(shape)
    if pos != len(view):
        raise CheckpointError(f"{len(view) - pos} trailing bytes in checkpoint")
    return tensors, metadata


def save_checkpoint(
    path: Union[str, Path],
    tensors: Mapping[str, np.ndarray],
    metadata: Mapping[str, Any],
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_checkpoint(tensors, metadata))
    logger.debug("wrote %d tensors to %s", len(tensors), path)
    return path


def load_checkpoint(path: Union[str, Path]) -> Tuple["OrderedDict[str, np.ndarray]", Dict[str, Any]]:
    path = Path(path)
    if not path.is_file():
        raise LoadError(f"checkpoint not found: {path}")
    return decode_checkpoint(path.read_bytes())
