"""Separable spherical convolution: LUT gather, 9-tap group mix, pointwise expand.

The gather turns an (N, H, W) feature map into nine sub-images (9N, H, W) by
pure index lookup (no padding -- the tables already wrap the seam and handle
the poles).  A per-channel combination of the nine samples (a group
convolution of kernel size 1, one group per input channel) applies the kernel
weights, and a 1x1 pointwise convolution expands to the output channels.
The composition equals a direct per-pixel spherical convolution exactly.
"""

from __future__ import annotations

import numpy as np

from .lut import KernelLut
from .nn.core import Parameter

WEIGHT_PRESETS = {
    "average": np.full(9, 1.0 / 9.0),
    "center-identity": np.array([1.0] + [0.0] * 8),
    "ring-laplacian": np.array([1.0] + [-0.125] * 8),
}


def gather(x: np.ndarray, lut: KernelLut) -> np.ndarray:
    """Map (N, H, W) to (9N, H, W); output channel k*N + c samples x[c] at table k."""
    n, h, w = x.shape
    if (h, w) != lut.grid.shape:
        raise ValueError(f"feature {h}x{w} does not match LUT grid {lut.grid.shape}")
    xf = x.reshape(n, h * w)
    out = xf[:, lut.tables]            # (N, 9, H*W)
    return out.transpose(1, 0, 2).reshape(9 * n, h, w)


def gather_backward(dy: np.ndarray, lut: KernelLut, in_channels: int) -> np.ndarray:
    """Scatter-add adjoint of :func:`gather`."""
    h, w = lut.grid.shape
    dyf = dy.reshape(9, in_channels, h * w)
    dx = np.zeros((in_channels, h * w))
    rows = np.arange(in_channels)[:, None]
    for k in range(9):
        np.add.at(dx, (rows, lut.tables[k][None, :]), dyf[k])
    return dx.reshape(in_channels, h, w)


class SphericalConv:
    """One spherical convolution layer (N -> N1 channels on a fixed grid)."""

    def __init__(self, lut: KernelLut, in_ch: int, out_ch: int, rng, name: str):
        self.lut = lut
        self.in_ch, self.out_ch = in_ch, out_ch
        # near-average-pooling start for the 9 taps; pointwise gets fan-in scaling
        gw = 1.0 / 9.0 + rng.uniform(-0.01, 0.01, size=(in_ch, 9))
        self.group_weights = Parameter(gw, f"{name}.group_weights")
        self.group_bias = Parameter(np.zeros(in_ch), f"{name}.group_bias")
        pw = rng.normal(0.0, np.sqrt(2.0 / in_ch), size=(out_ch, in_ch))
        self.pointwise_weights = Parameter(pw, f"{name}.pointwise_weights")
        self.pointwise_bias = Parameter(np.zeros(out_ch), f"{name}.pointwise_bias")
        self.params = [self.group_weights, self.group_bias,
                       self.pointwise_weights, self.pointwise_bias]
        self._cache = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        n, h, w = x.shape
        if n != self.in_ch:
            raise ValueError(f"expected {self.in_ch} channels, got {n}")
        g = gather(x, self.lut).reshape(9, n, h * w)
        y1 = np.einsum("ck,kci->ci", self.group_weights.values, g)
        y1 += self.group_bias.values[:, None]
        y = self.pointwise_weights.values @ y1 + self.pointwise_bias.values[:, None]
        self._cache = (g, y1, (n, h, w))
        return y.reshape(self.out_ch, h, w)

    def backward(self, dy: np.ndarray):
        if self._cache is None:
            raise RuntimeError("backward before forward")
        g, y1, (n, h, w) = self._cache
        dyf = dy.reshape(self.out_ch, h * w)
        self.pointwise_bias.grad += dyf.sum(axis=1)
        self.pointwise_weights.grad += dyf @ y1.T
        dy1 = self.pointwise_weights.values.T @ dyf
        self.group_bias.grad += dy1.sum(axis=1)
        self.group_weights.grad += np.einsum("ci,kci->ck", dy1, g)
        dg = np.einsum("ck,ci->kci", self.group_weights.values, dy1)
        return gather_backward(dg.reshape(9 * n, h, w), self.lut, n)


def preset_layer(lut: KernelLut, channels: int, preset: str) -> SphericalConv:
    """Channel-preserving layer with named tap weights and identity pointwise."""
    if preset not in WEIGHT_PRESETS:
        raise ValueError(f"unknown preset {preset!r}; have {sorted(WEIGHT_PRESETS)}")
    rng = np.random.default_rng(0)
    layer = SphericalConv(lut, channels, channels, rng, f"preset_{preset}")
    layer.group_weights.values = np.tile(WEIGHT_PRESETS[preset], (channels, 1))
    layer.group_bias.values = 0.0
    layer.pointwise_weights.values = np.eye(channels)
    layer.pointwise_bias.values = 0.0
    return layer
