"""Per-pixel kernel look-up tables and their binary serialization.

For every pixel the nine kernel points are rotated into place, projected back
to angles, and assigned to the nearest pixel center (the cell containing the
angle, which is the same thing for center sampling).  Table ``k`` holds the
flat index ``v*W + u`` of kernel point ``k`` for every pixel; table 0 is the
identity permutation.

Compilation exploits the exact longitude covariance of the continuous
rotation scheme: the kernel at column ``u`` is the column-0 kernel rotated
about Z by exactly ``u`` column pitches, so only column 0 is computed per row
and the remaining columns are integer column shifts.  This makes the tables
longitude-shift covariant *by construction* (and is bit-identical to the
direct per-pixel chain on all supported grids; the fractional pixel
coordinates stay far from cell boundaries).

File format (little-endian): magic ``SLUT``, u16 version=1, u32 H, u32 W,
``9*H*W`` u32 flat indices (table-major), u64 FNV-1a checksum of the index
bytes.
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass, field

import numpy as np

from .geometry import TWO_PI, ErpGrid, angles_from_point, pixel_to_angles
from .kernel import base_pattern, continuous_rotation_angles, kernel_at

LUT_MAGIC = b"SLUT"
LUT_VERSION = 1

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


class LutFormatError(ValueError):
    """Corrupt or truncated LUT file header/payload."""


class LutChecksumError(ValueError):
    """LUT payload does not match its stored checksum."""


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a hash."""
    h = _FNV_OFFSET
    for b in data:
        h = ((h ^ b) * _FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


@dataclass(frozen=True)
class KernelLut:
    """Nine flat-index tables of shape (H*W,) plus an integrity checksum."""

    grid: ErpGrid
    tables: np.ndarray  # (9, H*W) int64, entries in [0, H*W)
    checksum: int = field(default=0)

    def __post_init__(self):
        if self.tables.shape != (9, self.grid.npix):
            raise ValueError(f"tables shape {self.tables.shape} does not match grid")
        if self.checksum == 0:
            object.__setattr__(self, "checksum", fnv1a64(self._index_bytes()))

    def _index_bytes(self) -> bytes:
        return self.tables.astype("<u4").tobytes()

    def table_grids(self) -> np.ndarray:
        """Tables reshaped to (9, H, W)."""
        return self.tables.reshape(9, self.grid.height, self.grid.width)


def compile_lut(grid: ErpGrid) -> KernelLut:
    """Build the nine per-pixel sample tables for ``grid``."""
    h, w = grid.height, grid.width
    pattern = base_pattern(grid)

    rows = np.arange(h)
    theta0, phi0 = pixel_to_angles(rows, np.zeros(h), grid)
    points = kernel_at(theta0, phi0, pattern, angles_fn=continuous_rotation_angles)
    tk, pk = angles_from_point(points)  # (H, 9) each

    v = np.clip(np.floor(tk * (h / np.pi)).astype(np.int64), 0, h - 1)
    u0 = np.floor(pk * (w / TWO_PI)).astype(np.int64) % w

    # column u samples column-0's assignments shifted by u (exact Z covariance)
    cols = np.arange(w)
    u_all = (u0[:, None, :] + cols[None, :, None]) % w  # (H, W, 9)
    flat = v[:, None, :] * w + u_all
    tables = np.ascontiguousarray(flat.transpose(2, 0, 1).reshape(9, h * w))
    return KernelLut(grid=grid, tables=tables)


def save_lut(lut: KernelLut, path) -> None:
    """Write the binary LUT file."""
    payload = lut._index_bytes()
    with open(path, "wb") as f:
        f.write(LUT_MAGIC)
        f.write(struct.pack("<H", LUT_VERSION))
        f.write(struct.pack("<II", lut.grid.height, lut.grid.width))
        f.write(payload)
        f.write(struct.pack("<Q", fnv1a64(payload)))


def load_lut(path) -> KernelLut:
    """Read a binary LUT file, verifying magic, version, dims and checksum."""
    with open(path, "rb") as f:
        data = f.read()
    return _parse_lut(data)


def _parse_lut(data: bytes) -> KernelLut:
    header = struct.calcsize("<4sHII")
    if len(data) < header:
        raise LutFormatError("truncated LUT header")
    magic, version, h, w = struct.unpack_from("<4sHII", data, 0)
    if magic != LUT_MAGIC:
        raise LutFormatError(f"bad magic {magic!r}")
    if version != LUT_VERSION:
        raise LutFormatError(f"unsupported LUT version {version}")
    try:
        grid = ErpGrid(h, w)
    except ValueError as exc:
        raise LutFormatError(str(exc)) from exc
    body = 9 * h * w * 4
    if len(data) != header + body + 8:
        raise LutFormatError(
            f"bad file size {len(data)}, expected {header + body + 8}"
        )
    payload = data[header : header + body]
    (stored,) = struct.unpack_from("<Q", data, header + body)
    if fnv1a64(payload) != stored:
        raise LutChecksumError("LUT checksum mismatch")
    tables = np.frombuffer(payload, dtype="<u4").astype(np.int64).reshape(9, h * w)
    if tables.max(initial=0) >= h * w:
        raise LutFormatError("LUT index out of range")
    return KernelLut(grid=grid, tables=tables)


_lut_cache: dict[tuple[int, int], KernelLut] = {}


def get_lut(grid: ErpGrid, cache_dir=None) -> KernelLut:
    """Fetch the LUT for ``grid``, memoized in-process and optionally on disk.

    With ``cache_dir`` set, the table is loaded from / saved to
    ``lut_{H}x{W}.slut`` inside it (one file per feature-map resolution).
    """
    key = (grid.height, grid.width)
    if key in _lut_cache:
        return _lut_cache[key]
    if cache_dir is not None:
        import os

        path = os.path.join(cache_dir, f"lut_{grid.height}x{grid.width}.slut")
        if os.path.exists(path):
            lut = load_lut(path)
            _lut_cache[key] = lut
            return lut
        lut = compile_lut(grid)
        os.makedirs(cache_dir, exist_ok=True)
        save_lut(lut, path)
    else:
        lut = compile_lut(grid)
    _lut_cache[key] = lut
    return lut


def lut_bytes(lut: KernelLut) -> bytes:
    """Serialize to bytes (same layout as the file)."""
    buf = io.BytesIO()
    buf.write(LUT_MAGIC)
    buf.write(struct.pack("<H", LUT_VERSION))
    buf.write(struct.pack("<II", lut.grid.height, lut.grid.width))
    payload = lut._index_bytes()
    buf.write(payload)
    buf.write(struct.pack("<Q", fnv1a64(payload)))
    return buf.getvalue()
