"""Conversions between ERP pixel coordinates, spherical angles, and unit vectors.

Conventions fixed here and relied on everywhere else:

* ``theta`` is the inclination from +Z in ``[0, pi]``; ``phi`` is the azimuth
  from +X in the X-Y plane, normalized to ``[0, 2*pi)``.
* Points on the unit sphere are arrays ``(..., 3)`` of ``(x, y, z)``.
* Pixels sample cell centers: row ``v`` covers ``theta = (v + 0.5) * pi / H``,
  column ``u`` covers ``phi = (u + 0.5) * 2*pi / W``.  No pixel center ever
  sits exactly on a pole or on the ``phi = 0``/``pi`` meridians.
* Columns wrap (the seam is continuous); rows clamp (no wrap across poles --
  points pushed past a pole are handled upstream at their exact spherical
  position, so the clamp only guards numeric edge cases).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class ErpGrid:
    """Equirectangular grid of ``height`` x ``width`` pixels (1:2 aspect)."""

    height: int
    width: int

    def __post_init__(self):
        if self.height < 2 or self.width < 4:
            raise ValueError(f"grid too small: {self.height}x{self.width}")
        if self.width != 2 * self.height:
            raise ValueError(
                f"ERP grid must have width == 2*height, got {self.height}x{self.width}"
            )

    @property
    def shape(self) -> tuple[int, int]:
        return (self.height, self.width)

    @property
    def npix(self) -> int:
        return self.height * self.width


def angles_from_point(p):
    """Unit vector(s) ``(..., 3)`` -> ``(theta, phi)`` with phi in [0, 2pi)."""
    p = np.asarray(p, dtype=np.float64)
    theta = np.arccos(np.clip(p[..., 2], -1.0, 1.0))
    phi = np.arctan2(p[..., 1], p[..., 0])
    phi = np.where(phi < 0.0, phi + TWO_PI, phi)
    return theta, phi


def point_from_angles(theta, phi):
    """``(theta, phi)`` -> unit vector(s) of shape ``(..., 3)``."""
    theta = np.asarray(theta, dtype=np.float64)
    phi = np.asarray(phi, dtype=np.float64)
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


def pixel_to_angles(v, u, grid: ErpGrid):
    """Pixel (row ``v``, col ``u``) -> angles of its cell center."""
    v = np.asarray(v, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    theta = (v + 0.5) * (np.pi / grid.height)
    phi = (u + 0.5) * (TWO_PI / grid.width)
    return theta, phi


def angles_to_pixel(theta, phi, grid: ErpGrid):
    """Angles -> integer pixel indices; column wraps, row clamps."""
    theta = np.asarray(theta, dtype=np.float64)
    phi = np.asarray(phi, dtype=np.float64)
    v = np.floor(theta * (grid.height / np.pi)).astype(np.int64)
    v = np.clip(v, 0, grid.height - 1)
    u = np.floor(phi * (grid.width / TWO_PI)).astype(np.int64) % grid.width
    return v, u


def grid_angles(grid: ErpGrid):
    """Cell-center angles for the whole grid: theta (H, W), phi (H, W)."""
    v = np.arange(grid.height, dtype=np.float64)
    u = np.arange(grid.width, dtype=np.float64)
    theta = (v + 0.5) * (np.pi / grid.height)
    phi = (u + 0.5) * (TWO_PI / grid.width)
    return np.meshgrid(theta, phi, indexing="ij")


def grid_directions(grid: ErpGrid):
    """Unit view direction of every pixel center, shape (H, W, 3)."""
    theta, phi = grid_angles(grid)
    return point_from_angles(theta, phi)
