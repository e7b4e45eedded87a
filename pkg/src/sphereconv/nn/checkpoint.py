"""Named-tensor checkpoint files.

Layout (little-endian): magic ``SPCK``, u16 version=1, u32 tensor count, then
per tensor [u16 name length][utf-8 name][u8 ndim][ndim x u32 dims][float64
data], and a trailing u64 FNV-1a checksum of everything after the count.
"""

from __future__ import annotations

import struct

import numpy as np

from ..lut import fnv1a64

CKPT_MAGIC = b"SPCK"
CKPT_VERSION = 1


class CheckpointFormatError(ValueError):
    """Corrupt or truncated checkpoint file."""


class CheckpointChecksumError(ValueError):
    """Checkpoint payload does not match its stored checksum."""


def save_checkpoint(named_arrays, path) -> None:
    """Write name -> array pairs; accepts a dict or Parameter iterable."""
    if not isinstance(named_arrays, dict):
        named_arrays = {p.name: p.values for p in named_arrays}
    chunks = []
    for name, arr in named_arrays.items():
        arr = np.asarray(arr, dtype=np.float64)
        nb = name.encode("utf-8")
        chunks.append(struct.pack("<H", len(nb)))
        chunks.append(nb)
        chunks.append(struct.pack("<B", arr.ndim))
        chunks.append(struct.pack(f"<{arr.ndim}I", *arr.shape))
        chunks.append(arr.astype("<f8").tobytes())
    payload = b"".join(chunks)
    with open(path, "wb") as f:
        f.write(CKPT_MAGIC)
        f.write(struct.pack("<H", CKPT_VERSION))
        f.write(struct.pack("<I", len(named_arrays)))
        f.write(payload)
        f.write(struct.pack("<Q", fnv1a64(payload)))


def load_checkpoint(path) -> dict[str, np.ndarray]:
    with open(path, "rb") as f:
        data = f.read()
    head = struct.calcsize("<4sHI")
    if len(data) < head + 8:
        raise CheckpointFormatError("truncated checkpoint header")
    magic, version, count = struct.unpack_from("<4sHI", data, 0)
    if magic != CKPT_MAGIC:
        raise CheckpointFormatError(f"bad magic {magic!r}")
    if version != CKPT_VERSION:
        raise CheckpointFormatError(f"unsupported checkpoint version {version}")
    payload = data[head:-8]
    (stored,) = struct.unpack_from("<Q", data, len(data) - 8)
    if fnv1a64(payload) != stored:
        raise CheckpointChecksumError("checkpoint checksum mismatch")
    out: dict[str, np.ndarray] = {}
    at = 0
    for _ in range(count):
        try:
            (nlen,) = struct.unpack_from("<H", payload, at)
            at += 2
            name = payload[at : at + nlen].decode("utf-8")
            at += nlen
            (ndim,) = struct.unpack_from("<B", payload, at)
            at += 1
            dims = struct.unpack_from(f"<{ndim}I", payload, at)
            at += 4 * ndim
            size = int(np.prod(dims)) if ndim else 1
            arr = np.frombuffer(payload, dtype="<f8", count=size, offset=at)
            at += 8 * size
        except (struct.error, ValueError) as exc:
            raise CheckpointFormatError("truncated checkpoint entry") from exc
        out[name] = arr.reshape(dims).astype(np.float64)
    if at != len(payload):
        raise CheckpointFormatError("trailing bytes in checkpoint payload")
    return out


def restore_parameters(params, state: dict[str, np.ndarray]) -> None:
    """Copy arrays from ``state`` into matching named parameters."""
    for p in params:
        if p.name not in state:
            raise CheckpointFormatError(f"checkpoint missing parameter {p.name}")
        if state[p.name].shape != p.values.shape:
            raise CheckpointFormatError(
                f"shape mismatch for {p.name}: "
                f"{state[p.name].shape} vs {p.values.shape}"
            )
        p.values = state[p.name]
