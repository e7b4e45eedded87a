"""Procedural panoramic RGB-D scenes: box rooms ray-cast to ERP.

A scene is an axis-aligned box room (half-extents per axis), a camera
strictly inside it, a flat albedo per face, and one directional light.  The
renderer casts a ray along every pixel's view direction and takes the first
face hit (closed form via the slab method, so tests can recompute depth
analytically).  Shading is Lambertian against the inward face normal with a
0.1 ambient floor, scaled by the albedo so RGB stays in [0, 1].
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .geometry import ErpGrid, grid_directions
from .imgio import read_pfm, read_ppm, write_pfm, write_ppm

EXTENT_RANGE = (1.0, 3.0)  # within the spec'd [1, 5] m envelope
CAMERA_MARGIN = 0.45       # camera stays within +-45% of each half-extent


@dataclass(frozen=True)
class RoomScene:
    half_extents: np.ndarray  # (3,) meters, each in [1, 5]
    camera: np.ndarray        # (3,) strictly inside the box
    albedos: np.ndarray       # (6, 3) per face: +x, -x, +y, -y, +z, -z
    light: np.ndarray         # (3,) unit vector toward the light
    seed: int = 0

    def __post_init__(self):
        he = np.asarray(self.half_extents, dtype=np.float64)
        if not ((he >= 1.0) & (he <= 5.0)).all():
            raise ValueError("half-extents must lie in [1, 5] m")
        cam = np.asarray(self.camera, dtype=np.float64)
        if not (np.abs(cam) < he).all():
            raise ValueError("camera must be strictly inside the box")


@dataclass
class RgbdSample:
    rgb: np.ndarray    # (3, H, W) in [0, 1]
    depth: np.ndarray  # (1, H, W) meters, > 0
    mask: np.ndarray   # (1, H, W), all ones for synthetic scenes


def render(scene: RoomScene, grid: ErpGrid, yaw_columns: int = 0) -> RgbdSample:
    """Ray-cast the room; ``yaw_columns`` rotates the view by whole columns.

    The yaw is quantized to columns and realized by rolling the direction
    grid, so ``render(scene, g, k)`` equals ``np.roll(render(scene, g), -k)``
    along columns bit-for-bit.
    """
    dirs = grid_directions(grid)  # (H, W, 3)
    if yaw_columns:
        dirs = np.roll(dirs, -int(yaw_columns), axis=1)
    he = np.asarray(scene.half_extents, dtype=np.float64)
    cam = np.asarray(scene.camera, dtype=np.float64)

    with np.errstate(divide="ignore"):
        # distance to the face each axis-direction is heading toward
        t_axis = (np.sign(dirs) * he - cam) / dirs
    t_axis = np.where(dirs == 0.0, np.inf, t_axis)
    axis = np.argmin(t_axis, axis=-1)            # (H, W)
    depth = np.take_along_axis(t_axis, axis[..., None], axis=-1)[..., 0]

    # face index: 2*axis + (0 if heading +, 1 if heading -)
    heading = np.take_along_axis(dirs, axis[..., None], axis=-1)[..., 0]
    face = 2 * axis + (heading < 0.0)

    # inward normal of the hit face is -sign(d_axis) on that axis
    normal = np.zeros_like(dirs)
    np.put_along_axis(normal, axis[..., None], -np.sign(heading)[..., None], axis=-1)
    lambert = np.maximum(0.0, normal @ np.asarray(scene.light, dtype=np.float64))
    shade = 0.1 + 0.9 * lambert
    rgb = np.asarray(scene.albedos, dtype=np.float64)[face] * shade[..., None]

    return RgbdSample(
        rgb=np.ascontiguousarray(rgb.transpose(2, 0, 1)),
        depth=depth[None, :, :].copy(),
        mask=np.ones((1, grid.height, grid.width)),
    )


def yaw_roll(sample: RgbdSample, k: int) -> RgbdSample:
    """Deterministic yaw augmentation: roll all planes by k columns."""
    return RgbdSample(
        rgb=np.roll(sample.rgb, k, axis=2),
        depth=np.roll(sample.depth, k, axis=2),
        mask=np.roll(sample.mask, k, axis=2),
    )


def splitmix64(seed: int):
    """SplitMix64 stream; used to derive independent per-scene seeds."""
    state = seed & 0xFFFFFFFFFFFFFFFF
    while True:
        state = (state + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
        yield z ^ (z >> 31)


def random_scene(seed: int) -> RoomScene:
    rng = np.random.default_rng(seed)
    he = rng.uniform(*EXTENT_RANGE, size=3)
    cam = rng.uniform(-CAMERA_MARGIN, CAMERA_MARGIN, size=3) * he
    albedos = rng.uniform(0.15, 0.95, size=(6, 3))
    light = rng.normal(size=3)
    light /= np.linalg.norm(light)
    return RoomScene(he, cam, albedos, light, seed=seed)


def make_dataset(n_scenes: int, grid: ErpGrid, seed: int) -> list[RgbdSample]:
    """Render ``n_scenes`` rooms with per-scene seeds split from ``seed``."""
    if n_scenes < 1:
        raise ValueError("need at least one scene")
    stream = splitmix64(seed)
    return [render(random_scene(next(stream)), grid) for _ in range(n_scenes)]


def write_dataset(samples: list[RgbdSample], out_dir, seed: int, grid: ErpGrid) -> None:
    """scene_%04d.ppm + scene_%04d.pfm per sample, plus manifest.txt."""
    os.makedirs(out_dir, exist_ok=True)
    for i, s in enumerate(samples):
        write_ppm(os.path.join(out_dir, f"scene_{i:04d}.ppm"), s.rgb)
        write_pfm(os.path.join(out_dir, f"scene_{i:04d}.pfm"), s.depth)
    with open(os.path.join(out_dir, "manifest.txt"), "w") as f:
        f.write(f"seed={seed}\n")
        f.write(f"height={grid.height}\n")
        f.write(f"width={grid.width}\n")
        f.write(f"count={len(samples)}\n")


def load_dataset(data_dir) -> tuple[list[RgbdSample], dict]:
    """Read a dataset directory back; RGB is dequantized uint8, depth float32."""
    manifest_path = os.path.join(data_dir, "manifest.txt")
    if not os.path.exists(manifest_path):
        raise FileNotFoundError(f"no manifest.txt in {data_dir}")
    meta: dict = {}
    with open(manifest_path) as f:
        for line in f:
            line = line.strip()
            if line and not line.startswith("#"):
                k, _, v = line.partition("=")
                meta[k.strip()] = v.strip()
    count = int(meta["count"])
    samples = []
    for i in range(count):
        rgb = read_ppm(os.path.join(data_dir, f"scene_{i:04d}.ppm"))
        depth = read_pfm(os.path.join(data_dir, f"scene_{i:04d}.pfm"))
        samples.append(RgbdSample(rgb=rgb, depth=depth, mask=np.ones_like(depth)))
    return samples, meta
