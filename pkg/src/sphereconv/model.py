"""Desk-scale panoramic depth networks.

The student is an encoder-decoder over ERP RGB with a parallel spherical-conv
branch on the two shallowest scales, fused per scale, U-Net-style skip
concatenations in the decoder, a sub-pixel final upsampling stage, and a
1x1-conv + ReLU depth head.  The teacher is a plain bottleneck autoencoder
over depth maps (no skips -- its deepest latent must carry the whole
reconstruction, which is what makes it useful as distillation guidance).

Channel ladder (8, 16, 32, 64) halving 64x128 down to 8x16; the latent is the
deepest encoder activation (64 x H/8 x W/8).
"""

from __future__ import annotations

import numpy as np

from .geometry import ErpGrid
from .lut import get_lut
from .nn.core import Parameter, check_unique_names
from .nn.layers import (
    AvgPool2x2,
    BilinearUpsample2x,
    Conv2d,
    ReLU,
    SubpixelUpsample2x,
    concat_channels,
    split_channels,
)
from .sconv import SphericalConv

CHANNEL_LADDER = (8, 16, 32, 64)


class BandFusion:
    """Adaptive weighted fusion that keeps the mid-latitude band planar.

    f = w0*f_erp + w1*f_sph with learnable scalars; the middle band of rows
    [floor(H*band_fraction), H - floor(H*band_fraction)) is then replaced by
    the planar features (distortion there is negligible and the planar branch
    is the stronger extractor); finally concat with f_erp, 1x1 conv back to C
    channels, ReLU.
    """

    def __init__(self, channels: int, rng, name: str, band_fraction: float = 1.0 / 3.0):
        self.channels = channels
        self.band_fraction = band_fraction
        self.w0 = Parameter(np.array([0.5]), f"{name}.w0")
        self.w1 = Parameter(np.array([0.5]), f"{name}.w1")
        self.conv = Conv2d(2 * channels, channels, 1, rng, f"{name}.conv")
        self.relu = ReLU()
        self.params = [self.w0, self.w1, *self.conv.params]
        self._cache = None

    def band_rows(self, height: int) -> tuple[int, int]:
        lo = int(np.floor(height * self.band_fraction))
        return lo, height - lo

    def forward(self, f_erp: np.ndarray, f_sph: np.ndarray) -> np.ndarray:
        if f_erp.shape != f_sph.shape:
            raise ValueError("fusion inputs must have equal shapes")
        lo, hi = self.band_rows(f_erp.shape[1])
        f = self.w0.values[0] * f_erp + self.w1.values[0] * f_sph
        f[:, lo:hi] = f_erp[:, lo:hi]
        out = self.relu.forward(self.conv.forward(concat_channels(f, f_erp)))
        self._cache = (f_erp, f_sph, lo, hi)
        return out

    def backward(self, dout: np.ndarray):
        f_erp, f_sph, lo, hi = self._cache
        dcat = self.conv.backward(self.relu.backward(dout))
        dfprime, dfe_direct = split_channels(dcat, [self.channels, self.channels])
        df = dfprime.copy()
        df[:, lo:hi] = 0.0
        self.w0.grad += (df * f_erp).sum()
        self.w1.grad += (df * f_sph).sum()
        df_erp = dfe_direct + self.w0.values[0] * df
        df_erp[:, lo:hi] += dfprime[:, lo:hi]
        df_sph = self.w1.values[0] * df
        return df_erp, df_sph


class ConcatFusion:
    """Plain concat + 1x1 conv + ReLU fusion (the no-band-fusion ablation)."""

    def __init__(self, channels: int, rng, name: str):
        self.channels = channels
        self.conv = Conv2d(2 * channels, channels, 1, rng, f"{name}.conv")
        self.relu = ReLU()
        self.params = list(self.conv.params)

    def forward(self, f_erp: np.ndarray, f_sph: np.ndarray) -> np.ndarray:
        if f_erp.shape != f_sph.shape:
            raise ValueError("fusion inputs must have equal shapes")
        return self.relu.forward(self.conv.forward(concat_channels(f_erp, f_sph)))

    def backward(self, dout: np.ndarray):
        dcat = self.conv.backward(self.relu.backward(dout))
        return tuple(split_channels(dcat, [self.channels, self.channels]))


class StudentNet:
    """RGB panorama -> depth, exposing the deepest latent for distillation."""

    def __init__(self, seed: int = 0, height: int = 64, fusion: str = "banded",
                 band_fraction: float = 1.0 / 3.0, lut_cache_dir=None,
                 head_bias: float = 1.0):
        if height % 8:
            raise ValueError("height must be divisible by 8")
        rng = np.random.default_rng(seed)
        self.grid = ErpGrid(height, 2 * height)
        half = ErpGrid(height // 2, height)
        c1, c2, c3, c4 = CHANNEL_LADDER
        self.fusion_kind = fusion

        self.conv_e1 = Conv2d(3, c1, 3, rng, "enc1")
        self.sconv_s1 = SphericalConv(get_lut(self.grid, lut_cache_dir), 3, c1, rng, "sph1")
        self.conv_e2 = Conv2d(c1, c2, 3, rng, "enc2")
        self.sconv_s2 = SphericalConv(get_lut(half, lut_cache_dir), c1, c2, rng, "sph2")
        if fusion == "banded":
            self.fuse1 = BandFusion(c1, rng, "fuse1", band_fraction)
            self.fuse2 = BandFusion(c2, rng, "fuse2", band_fraction)
        elif fusion == "concat":
            self.fuse1 = ConcatFusion(c1, rng, "fuse1")
            self.fuse2 = ConcatFusion(c2, rng, "fuse2")
        else:
            raise ValueError(f"unknown fusion kind {fusion!r}")
        self.conv_e3 = Conv2d(c2, c3, 3, rng, "enc3")
        self.conv_e4 = Conv2d(c3, c4, 3, rng, "enc4")
        self.dconv3 = Conv2d(c4 + c3, c3, 3, rng, "dec3")
        self.dconv2 = Conv2d(c3 + c2, c2, 3, rng, "dec2")
        self.conv_sp = Conv2d(c2, 4 * c1, 3, rng, "dec_subpix")
        self.dconv1 = Conv2d(c1 + c1, c1, 3, rng, "dec1")
        # positive bias start (about the indoor depth mid-range) keeps the
        # ReLU head in its linear region early on
        self.head = Conv2d(c1, 1, 1, rng, "head", bias_init=head_bias)

        self.pool_p1 = AvgPool2x2()
        self.pool_p2 = AvgPool2x2()
        self.pool_p3 = AvgPool2x2()
        self.pool_s1 = AvgPool2x2()
        self.relu_e1 = ReLU()
        self.relu_s1 = ReLU()
        self.relu_e2 = ReLU()
        self.relu_s2 = ReLU()
        self.relu_e3 = ReLU()
        self.relu_e4 = ReLU()
        self.relu_d3 = ReLU()
        self.relu_d2 = ReLU()
        self.relu_d1 = ReLU()
        self.relu_head = ReLU()
        self.up3 = BilinearUpsample2x()
        self.up2 = BilinearUpsample2x()
        self.subpix = SubpixelUpsample2x()

        self._layers = [
            self.conv_e1, self.sconv_s1, self.conv_e2, self.sconv_s2,
            self.fuse1, self.fuse2, self.conv_e3, self.conv_e4,
            self.dconv3, self.dconv2, self.conv_sp, self.dconv1, self.head,
        ]
        check_unique_names(self.parameters())

    def parameters(self) -> list[Parameter]:
        out = []
        for layer in self._layers:
            out.extend(layer.params)
        return out

    def forward(self, rgb: np.ndarray):
        """(3, H, W) in [0, 1] -> (depth (1, H, W) >= 0, latent (64, H/8, W/8))."""
        if rgb.shape != (3, *self.grid.shape):
            raise ValueError(f"expected input (3, {self.grid.height}, {self.grid.width})")
        x1 = self.relu_e1.forward(self.conv_e1.forward(rgb))
        s1 = self.relu_s1.forward(self.sconv_s1.forward(rgb))
        f1 = self.fuse1.forward(x1, s1)
        x2 = self.relu_e2.forward(self.conv_e2.forward(self.pool_p1.forward(f1)))
        s2 = self.relu_s2.forward(self.sconv_s2.forward(self.pool_s1.forward(s1)))
        f2 = self.fuse2.forward(x2, s2)
        x3 = self.relu_e3.forward(self.conv_e3.forward(self.pool_p2.forward(f2)))
        x4 = self.relu_e4.forward(self.conv_e4.forward(self.pool_p3.forward(x3)))
        d3 = self.relu_d3.forward(
            self.dconv3.forward(concat_channels(self.up3.forward(x4), x3)))
        d2 = self.relu_d2.forward(
            self.dconv2.forward(concat_channels(self.up2.forward(d3), f2)))
        sp = self.subpix.forward(self.conv_sp.forward(d2))
        d1 = self.relu_d1.forward(self.dconv1.forward(concat_channels(sp, f1)))
        depth = self.relu_head.forward(self.head.forward(d1))
        return depth, x4

    def backward(self, ddepth: np.ndarray, dlatent=None) -> None:
        c1, c2, c3, c4 = CHANNEL_LADDER
        dd1 = self.dconv1.backward(self.relu_d1.backward(
            self.head.backward(self.relu_head.backward(ddepth))))
        dsp, df1_skip = split_channels(dd1, [c1, c1])
        dd2 = self.conv_sp.backward(self.subpix.backward(dsp))
        dc2 = self.dconv2.backward(self.relu_d2.backward(dd2))
        du2, df2_skip = split_channels(dc2, [c3, c2])
        dc3 = self.dconv3.backward(self.relu_d3.backward(self.up2.backward(du2)))
        du3, dx3_skip = split_channels(dc3, [c4, c3])
        dx4 = self.up3.backward(du3)
        if dlatent is not None:
            dx4 = dx4 + dlatent
        dx3 = self.pool_p3.backward(
            self.conv_e4.backward(self.relu_e4.backward(dx4))) + dx3_skip
        df2 = self.pool_p2.backward(
            self.conv_e3.backward(self.relu_e3.backward(dx3))) + df2_skip
        dx2, ds2 = self.fuse2.backward(df2)
        df1 = self.pool_p1.backward(
            self.conv_e2.backward(self.relu_e2.backward(dx2))) + df1_skip
        ds1_pool = self.pool_s1.backward(
            self.sconv_s2.backward(self.relu_s2.backward(ds2)))
        dx1, ds1_fuse = self.fuse1.backward(df1)
        ds1 = ds1_pool + ds1_fuse
        self.sconv_s1.backward(self.relu_s1.backward(ds1))
        self.conv_e1.backward(self.relu_e1.backward(dx1))


class TeacherNet:
    """Depth-map autoencoder; deepest latent guides the student during training.

    ``input_scale`` maps metric depth into a unit-ish range before the first
    convolution (the head still predicts meters directly).
    """

    def __init__(self, seed: int = 0, height: int = 64, head_bias: float = 1.0,
                 input_scale: float = 0.25):
        if height % 8:
            raise ValueError("height must be divisible by 8")
        self.input_scale = input_scale
        rng = np.random.default_rng(seed)
        self.grid = ErpGrid(height, 2 * height)
        c1, c2, c3, c4 = CHANNEL_LADDER
        self.conv_e1 = Conv2d(1, c1, 3, rng, "enc1")
        self.conv_e2 = Conv2d(c1, c2, 3, rng, "enc2")
        self.conv_e3 = Conv2d(c2, c3, 3, rng, "enc3")
        self.conv_e4 = Conv2d(c3, c4, 3, rng, "enc4")
        self.dconv3 = Conv2d(c4, c3, 3, rng, "dec3")
        self.dconv2 = Conv2d(c3, c2, 3, rng, "dec2")
        self.conv_sp = Conv2d(c2, 4 * c1, 3, rng, "dec_subpix")
        self.dconv1 = Conv2d(c1, c1, 3, rng, "dec1")
        self.head = Conv2d(c1, 1, 1, rng, "head", bias_init=head_bias)
        self.pools = [AvgPool2x2() for _ in range(3)]
        self.relus = [ReLU() for _ in range(7)]
        self.relu_head = ReLU()
        self.up3 = BilinearUpsample2x()
        self.up2 = BilinearUpsample2x()
        self.subpix = SubpixelUpsample2x()
        self._layers = [self.conv_e1, self.conv_e2, self.conv_e3, self.conv_e4,
                        self.dconv3, self.dconv2, self.conv_sp, self.dconv1, self.head]
        check_unique_names(self.parameters())

    def parameters(self) -> list[Parameter]:
        out = []
        for layer in self._layers:
            out.extend(layer.params)
        return out

    def forward(self, depth: np.ndarray):
        """(1, H, W) -> (reconstruction (1, H, W), latent (64, H/8, W/8))."""
        if depth.shape != (1, *self.grid.shape):
            raise ValueError(f"expected input (1, {self.grid.height}, {self.grid.width})")
        r = self.relus
        x1 = r[0].forward(self.conv_e1.forward(depth * self.input_scale))
        x2 = r[1].forward(self.conv_e2.forward(self.pools[0].forward(x1)))
        x3 = r[2].forward(self.conv_e3.forward(self.pools[1].forward(x2)))
        x4 = r[3].forward(self.conv_e4.forward(self.pools[2].forward(x3)))
        d3 = r[4].forward(self.dconv3.forward(self.up3.forward(x4)))
        d2 = r[5].forward(self.dconv2.forward(self.up2.forward(d3)))
        sp = self.subpix.forward(self.conv_sp.forward(d2))
        d1 = r[6].forward(self.dconv1.forward(sp))
        recon = self.relu_head.forward(self.head.forward(d1))
        return recon, x4

    def backward(self, drecon: np.ndarray) -> None:
        r = self.relus
        dd1 = self.head.backward(self.relu_head.backward(drecon))
        dsp = self.dconv1.backward(r[6].backward(dd1))
        dd2 = self.conv_sp.backward(self.subpix.backward(dsp))
        dd3 = self.up2.backward(self.dconv2.backward(r[5].backward(dd2)))
        dx4 = self.up3.backward(self.dconv3.backward(r[4].backward(dd3)))
        dx3 = self.pools[2].backward(self.conv_e4.backward(r[3].backward(dx4)))
        dx2 = self.pools[1].backward(self.conv_e3.backward(r[2].backward(dx3)))
        dx1 = self.pools[0].backward(self.conv_e2.backward(r[1].backward(dx2)))
        self.conv_e1.backward(r[0].backward(dx1))
