"""Binary PPM (P6, 8-bit) and PFM (little-endian) readers and writers.

PPM stores RGB quantized to uint8 with maxval 255 (other maxvals rejected);
PFM stores float32 depth (``Pf``) or color (``PF``) with the standard
negative-scale header marking little-endian data and rows bottom-to-top.
"""

from __future__ import annotations

import numpy as np


class PpmFormatError(ValueError):
    """Malformed or truncated PPM file."""


class PfmFormatError(ValueError):
    """Malformed or truncated PFM file."""


def write_ppm(path, rgb: np.ndarray) -> None:
    """Write (3, H, W) float values in [0, 1] (rounded to 8-bit) or uint8."""
    if rgb.ndim != 3 or rgb.shape[0] != 3:
        raise ValueError("write_ppm expects (3, H, W)")
    if rgb.dtype == np.uint8:
        data = rgb
    else:
        data = np.round(np.clip(rgb, 0.0, 1.0) * 255.0).astype(np.uint8)
    _, h, w = data.shape
    with open(path, "wb") as f:
        f.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        f.write(data.transpose(1, 2, 0).tobytes())


def read_ppm(path) -> np.ndarray:
    """Read a P6 PPM into float64 (3, H, W) in [0, 1]."""
    with open(path, "rb") as f:
        data = f.read()
    magic, at = _token(data, 0, PpmFormatError)
    if magic != b"P6":
        raise PpmFormatError(f"bad PPM magic {magic!r}")
    w, at = _int_token(data, at, PpmFormatError)
    h, at = _int_token(data, at, PpmFormatError)
    maxval, at = _int_token(data, at, PpmFormatError)
    if maxval != 255:
        raise PpmFormatError(f"only maxval 255 supported, got {maxval}")
    at += 1  # single whitespace after maxval
    need = w * h * 3
    if len(data) - at < need:
        raise PpmFormatError("truncated PPM pixel data")
    px = np.frombuffer(data, dtype=np.uint8, count=need, offset=at)
    return px.reshape(h, w, 3).transpose(2, 0, 1).astype(np.float64) / 255.0


def write_pfm(path, img: np.ndarray) -> None:
    """Write (H, W)/(1, H, W) as grayscale ``Pf`` or (3, H, W) as color ``PF``."""
    if img.ndim == 2:
        img = img[None]
    if img.ndim != 3 or img.shape[0] not in (1, 3):
        raise ValueError("write_pfm expects (1|3, H, W) or (H, W)")
    c, h, w = img.shape
    plane = img.transpose(1, 2, 0).astype("<f4")
    plane = plane[::-1]  # PFM rows run bottom-to-top
    with open(path, "wb") as f:
        f.write(b"PF\n" if c == 3 else b"Pf\n")
        f.write(f"{w} {h}\n".encode("ascii"))
        f.write(b"-1.0\n")  # negative scale: little-endian
        f.write(plane.tobytes())


def read_pfm(path) -> np.ndarray:
    """Read a PFM into float64 (C, H, W); only little-endian files accepted."""
    with open(path, "rb") as f:
        data = f.read()
    magic, at = _token(data, 0, PfmFormatError)
    if magic == b"PF":
        c = 3
    elif magic == b"Pf":
        c = 1
    else:
        raise PfmFormatError(f"bad PFM magic {magic!r}")
    w, at = _int_token(data, at, PfmFormatError)
    h, at = _int_token(data, at, PfmFormatError)
    scale_tok, at = _token(data, at, PfmFormatError)
    try:
        scale = float(scale_tok)
    except ValueError as exc:
        raise PfmFormatError(f"bad PFM scale {scale_tok!r}") from exc
    if scale >= 0.0:
        raise PfmFormatError("big-endian PFM (non-negative scale) not supported")
    at += 1  # single whitespace between header and raster
    need = w * h * c * 4
    if len(data) - at < need:
        raise PfmFormatError("truncated PFM pixel data")
    plane = np.frombuffer(data, dtype="<f4", count=w * h * c, offset=at)
    plane = plane.reshape(h, w, c)[::-1]
    return plane.transpose(2, 0, 1).astype(np.float64)


def _token(data: bytes, at: int, err) -> tuple[bytes, int]:
    """Next whitespace-delimited token, skipping '#' comment lines."""
    n = len(data)
    while at < n:
        ch = data[at : at + 1]
        if ch.isspace():
            at += 1
        elif ch == b"#":
            while at < n and data[at : at + 1] != b"\n":
                at += 1
        else:
            break
    if at >= n:
        raise err("truncated header")
    start = at
    while at < n and not data[at : at + 1].isspace():
        at += 1
    return data[start:at], at


def _int_token(data: bytes, at: int, err) -> tuple[int, int]:
    tok, at = _token(data, at, err)
    try:
        val = int(tok)
    except ValueError as exc:
        raise err(f"expected integer, got {tok!r}") from exc
    if val <= 0:
        raise err(f"non-positive header field {val}")
    return val, at
