"""Differentiable layers on (C, H, W) arrays with hand-written backward passes.

Every layer caches what its backward needs during forward; a backward call
consumes the most recent forward (single-use, like the rest of this package's
fixed-graph training loops).  Horizontal padding always wraps (the panorama
seam is continuous); vertical padding replicates edge rows.
"""

from __future__ import annotations

import numpy as np

from .core import Parameter


def pad_wrap_replicate(x: np.ndarray, p: int) -> np.ndarray:
    """Pad (C, H, W) by p: columns wrap circularly, rows replicate edges."""
    if p == 0:
        return x
    xw = np.concatenate([x[..., -p:], x, x[..., :p]], axis=-1)
    top = np.repeat(xw[:, :1, :], p, axis=1)
    bot = np.repeat(xw[:, -1:, :], p, axis=1)
    return np.concatenate([top, xw, bot], axis=1)


def pad_wrap_replicate_adjoint(dxp: np.ndarray, p: int, shape) -> np.ndarray:
    """Exact adjoint of :func:`pad_wrap_replicate`."""
    if p == 0:
        return dxp
    _, h, w = shape
    dxw = dxp[:, p : p + h, :].copy()
    dxw[:, 0, :] += dxp[:, :p, :].sum(axis=1)
    dxw[:, -1, :] += dxp[:, p + h :, :].sum(axis=1)
    dx = dxw[:, :, p : p + w].copy()
    dx[:, :, w - p :] += dxw[:, :, :p]
    dx[:, :, :p] += dxw[:, :, p + w :]
    return dx


class Conv2d:
    """Cross-correlation with kernel 1 or 3, optional channel groups.

    3x3 convolutions keep spatial size via wrap/replicate padding, so a pixel
    in column 0 reads column W-1 and the output stays seam-continuous.
    """

    def __init__(self, in_ch: int, out_ch: int, kernel: int, rng, name: str,
                 groups: int = 1, bias_init: float = 0.0):
        if kernel not in (1, 3):
            raise ValueError("kernel must be 1 or 3")
        if in_ch % groups or out_ch % groups:
            raise ValueError("channels must divide groups")
        self.in_ch, self.out_ch, self.kernel, self.groups = in_ch, out_ch, kernel, groups
        fan_in = (in_ch // groups) * kernel * kernel
        w = rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(out_ch, in_ch // groups, kernel, kernel))
        self.weight = Parameter(w, f"{name}.weight")
        self.bias = Parameter(np.full(out_ch, bias_init), f"{name}.bias")
        self.params = [self.weight, self.bias]
        self._cache = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        c, h, w = x.shape
        if c != self.in_ch:
            raise ValueError(f"expected {self.in_ch} channels, got {c}")
        p = self.kernel // 2
        xp = pad_wrap_replicate(x, p)
        k2 = self.kernel * self.kernel
        # (C, k*k, H, W): window (di, dj) of the padded input per channel
        cols = np.empty((c, k2, h, w))
        for di in range(self.kernel):
            for dj in range(self.kernel):
                cols[:, di * self.kernel + dj] = xp[:, di : di + h, dj : dj + w]
        cols = cols.reshape(c, k2, h * w)
        cg = c // self.groups
        og = self.out_ch // self.groups
        y = np.empty((self.out_ch, h * w))
        wmat = self.weight.values.reshape(self.out_ch, cg * k2)
        for g in range(self.groups):
            colg = cols[g * cg : (g + 1) * cg].reshape(cg * k2, h * w)
            y[g * og : (g + 1) * og] = wmat[g * og : (g + 1) * og] @ colg
        y += self.bias.values[:, None]
        self._cache = (cols, x.shape)
        return y.reshape(self.out_ch, h, w)

    def backward(self, dy: np.ndarray) -> np.ndarray:
        cols, x_shape = self._cache
        c, h, w = x_shape
        k2 = self.kernel * self.kernel
        cg = c // self.groups
        og = self.out_ch // self.groups
        dyf = dy.reshape(self.out_ch, h * w)
        self.bias.grad += dyf.sum(axis=1)
        wmat = self.weight.values.reshape(self.out_ch, cg * k2)
        dcols = np.empty((c, k2, h * w))
        for g in range(self.groups):
            colg = cols[g * cg : (g + 1) * cg].reshape(cg * k2, h * w)
            dyg = dyf[g * og : (g + 1) * og]
            self.weight.grad.reshape(self.out_ch, cg * k2)[g * og : (g + 1) * og] += dyg @ colg.T
            dcols[g * cg : (g + 1) * cg] = (wmat[g * og : (g + 1) * og].T @ dyg).reshape(cg, k2, h * w)
        p = self.kernel // 2
        dxp = np.zeros((c, h + 2 * p, w + 2 * p))
        dcols = dcols.reshape(c, k2, h, w)
        for di in range(self.kernel):
            for dj in range(self.kernel):
                dxp[:, di : di + h, dj : dj + w] += dcols[:, di * self.kernel + dj]
        return pad_wrap_replicate_adjoint(dxp, p, x_shape)


class ReLU:
    def __init__(self):
        self.params = []
        self._mask = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._mask = x > 0.0
        return np.where(self._mask, x, 0.0)

    def backward(self, dy: np.ndarray) -> np.ndarray:
        return np.where(self._mask, dy, 0.0)


class AvgPool2x2:
    """2x2 mean pooling, stride 2; the resolution ladder of the encoders."""

    def __init__(self):
        self.params = []
        self._shape = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        c, h, w = x.shape
        if h % 2 or w % 2:
            raise ValueError("AvgPool2x2 needs even spatial dims")
        self._shape = x.shape
        return 0.25 * (x[:, ::2, ::2] + x[:, 1::2, ::2] + x[:, ::2, 1::2] + x[:, 1::2, 1::2])

    def backward(self, dy: np.ndarray) -> np.ndarray:
        dx = np.zeros(self._shape)
        q = 0.25 * dy
        dx[:, ::2, ::2] = q
        dx[:, 1::2, ::2] = q
        dx[:, ::2, 1::2] = q
        dx[:, 1::2, 1::2] = q
        return dx


class BilinearUpsample2x:
    """Half-pixel-aligned 2x bilinear upsampling; columns wrap, rows clamp.

    Source offsets are +-0.25 pixels, so the four weights are the exact dyadic
    values 0.25/0.75 and a constant input stays constant to the last bit.
    """

    def __init__(self):
        self.params = []
        self._cache = None

    @staticmethod
    def _axis_indices(n: int, wrap: bool):
        src = (np.arange(2 * n) + 0.5) / 2.0 - 0.5
        i0 = np.floor(src).astype(np.int64)
        frac = src - i0
        i1 = i0 + 1
        if wrap:
            i0 %= n
            i1 %= n
        else:
            i0 = np.clip(i0, 0, n - 1)
            i1 = np.clip(i1, 0, n - 1)
        return i0, i1, frac

    def forward(self, x: np.ndarray) -> np.ndarray:
        c, h, w = x.shape
        r0, r1, fr = self._axis_indices(h, wrap=False)
        c0, c1, fc = self._axis_indices(w, wrap=True)
        self._cache = (x.shape, r0, r1, fr, c0, c1, fc)
        # two-stage lerp keeps constants bit-exact (a + w*(b - a) with b == a)
        xr0, xr1 = x[:, r0, :], x[:, r1, :]
        rows = xr0 + fr[None, :, None] * (xr1 - xr0)
        left, right = rows[:, :, c0], rows[:, :, c1]
        return left + fc[None, None, :] * (right - left)

    def backward(self, dy: np.ndarray) -> np.ndarray:
        shape, r0, r1, fr, c0, c1, fc = self._cache
        c = shape[0]
        dx = np.zeros(shape)
        wr0, wr1 = (1.0 - fr)[:, None], fr[:, None]
        wc0, wc1 = (1.0 - fc)[None, :], fc[None, :]
        ci = np.arange(c)[:, None, None]
        np.add.at(dx, (ci, r0[None, :, None], c0[None, None, :]), wr0 * wc0 * dy)
        np.add.at(dx, (ci, r0[None, :, None], c1[None, None, :]), wr0 * wc1 * dy)
        np.add.at(dx, (ci, r1[None, :, None], c0[None, None, :]), wr1 * wc0 * dy)
        np.add.at(dx, (ci, r1[None, :, None], c1[None, None, :]), wr1 * wc1 * dy)
        return dx


class SubpixelUpsample2x:
    """Channel-to-space rearrangement: (C, H, W) -> (C/4, 2H, 2W).

    out[c, 2i+di, 2j+dj] = x[4c + 2di + dj, i, j]; a pure permutation.
    """

    def __init__(self):
        self.params = []
        self._shape = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        c, h, w = x.shape
        if c % 4:
            raise ValueError("subpixel upsample needs channels divisible by 4")
        self._shape = x.shape
        return (
            x.reshape(c // 4, 2, 2, h, w)
            .transpose(0, 3, 1, 4, 2)
            .reshape(c // 4, 2 * h, 2 * w)
        )

    def backward(self, dy: np.ndarray) -> np.ndarray:
        c, h, w = self._shape
        return (
            dy.reshape(c // 4, h, 2, w, 2)
            .transpose(0, 2, 4, 1, 3)
            .reshape(c, h, w)
        )


def concat_channels(*xs: np.ndarray) -> np.ndarray:
    return np.concatenate(xs, axis=0)


def split_channels(dy: np.ndarray, sizes) -> list[np.ndarray]:
    out, at = [], 0
    for s in sizes:
        out.append(dy[at : at + s])
        at += s
    return out
