"""Versioned binary model file.

Layout (all integers little-endian):

    magic          4 bytes   b"IDS1"
    version        u32       currently 1
    metadata_len   u32
    metadata       UTF-8 JSON: architecture, seed, encoder metadata
                   (categories, label names, normalization params)
    payload_len    u64
    payload        per tensor, in declared layer order:
                       ndim u32, extents u32 * ndim, float32 data
    checksum       8 bytes   first 8 bytes of SHA-256 over the payload

The layout is the cross-process / cross-language compatibility surface;
writes are byte-deterministic for identical inputs.
"""

from __future__ import annotations

import hashlib
import json
import struct
from pathlib import Path

import numpy as np

from .errors import (
    BadMagicError,
    ChecksumError,
    ShapeError,
    TruncatedFileError,
    UnsupportedVersionError,
)
from .network import Architecture, ConvNet

MAGIC = b"IDS1"
VERSION = 1


def _arch_to_dict(arch: Architecture) -> dict:
    return {
        "input_len": arch.input_len,
        "num_classes": arch.num_classes,
        "conv_filters": list(arch.conv_filters),
        "kernel_len": arch.kernel_len,
        "pool_len": arch.pool_len,
        "dense_units": arch.dense_units,
        "dropout_rate": arch.dropout_rate,
        "conv_stride": arch.conv_stride,
    }


def _arch_from_dict(d: dict) -> Architecture:
    d = dict(d)
    d["conv_filters"] = tuple(d["conv_filters"])
    return Architecture(**d)


def write_model(net: ConvNet, encoder_metadata: dict, path: str | Path,
                seed: int = 0) -> None:
    meta = {
        "architecture": _arch_to_dict(net.arch),
        "seed": seed,
        "encoder": encoder_metadata,
    }
    meta_bytes = json.dumps(meta, sort_keys=True, separators=(",", ":")).encode("utf-8")

    payload = bytearray()
    for arr in net.param_arrays():
        payload += struct.pack("<I", arr.ndim)
        payload += struct.pack(f"<{arr.ndim}I", *arr.shape)
        payload += np.ascontiguousarray(arr, dtype="<f4").tobytes()
    checksum = hashlib.sha256(bytes(payload)).digest()[:8]

    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", VERSION))
        fh.write(struct.pack("<I", len(meta_bytes)))
        fh.write(meta_bytes)
        fh.write(struct.pack("<Q", len(payload)))
        fh.write(payload)
        fh.write(checksum)


def read_model(path: str | Path) -> tuple[ConvNet, dict]:
    """Returns (net, metadata). Validates magic, version and checksum before
    constructing any parameters."""
    blob = Path(path).read_bytes()
    if len(blob) < 4 or blob[:4] != MAGIC:
        raise BadMagicError(f"{path}: not a model file (bad magic)")
    if len(blob) < 12:
        raise TruncatedFileError(f"{path}: truncated header")
    (version,) = struct.unpack_from("<I", blob, 4)
    if version != VERSION:
        raise UnsupportedVersionError(f"{path}: unsupported format version {version}")
    (meta_len,) = struct.unpack_from("<I", blob, 8)
    meta_end = 12 + meta_len
    if len(blob) < meta_end:
        raise TruncatedFileError(f"{path}: truncated metadata")
    try:
        meta = json.loads(blob[12:meta_end].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise TruncatedFileError(f"{path}: unreadable metadata ({exc})") from exc

    if len(blob) < meta_end + 8:
        raise TruncatedFileError(f"{path}: missing payload length")
    (payload_len,) = struct.unpack_from("<Q", blob, meta_end)
    payload_start = meta_end + 8
    if len(blob) < payload_start + payload_len + 8:
        raise TruncatedFileError(
            f"{path}: file ends before declared payload + checksum"
        )
    payload = blob[payload_start:payload_start + payload_len]
    stored = blob[payload_start + payload_len:payload_start + payload_len + 8]
    if hashlib.sha256(payload).digest()[:8] != stored:
        raise ChecksumError(f"{path}: payload checksum mismatch")

    arch = _arch_from_dict(meta["architecture"])
    net = ConvNet.init(arch, seed=0)
    arrays = []
    offset = 0
    for name in ConvNet.PARAM_NAMES:
        if offset + 4 > len(payload):
            raise TruncatedFileError(f"{path}: payload ends before tensor {name}")
        (ndim,) = struct.unpack_from("<I", payload, offset)
        offset += 4
        if offset + 4 * ndim > len(payload):
            raise TruncatedFileError(f"{path}: payload ends inside {name} shape")
        shape = struct.unpack_from(f"<{ndim}I", payload, offset)
        offset += 4 * ndim
        count = int(np.prod(shape, dtype=np.int64)) if ndim else 1
        if offset + 4 * count > len(payload):
            raise TruncatedFileError(f"{path}: payload ends inside {name} data")
        arr = np.frombuffer(payload, dtype="<f4", count=count, offset=offset)
        offset += 4 * count
        arrays.append(arr.reshape(shape).astype(np.float32))
    if offset != len(payload):
        raise ShapeError(f"{path}: {len(payload) - offset} trailing payload bytes")
    net.set_param_arrays(arrays)
    return net, meta
