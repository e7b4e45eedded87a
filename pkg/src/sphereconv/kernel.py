"""Nine-point spherical kernel: base ring at the north pole plus per-pixel rotation.

The base pattern is the pole ``(0, 0, 1)`` surrounded by 8 points on the circle
of angular radius ``alpha = 2*pi / W`` (one equatorial pixel pitch), spaced
``pi/4`` apart in azimuth starting at ``pi/2``.  A rotation built from the
pixel's ``(theta, phi)`` carries the pattern anywhere on the sphere without
deforming it, so the kernel keeps identical pairwise point distances at every
pixel.

Two rotation-angle schemes are provided:

* :func:`rotation_angles` -- the piecewise scheme.  It flips the roll sign on
  the western hemisphere (``phi > pi``) and uses a pure pitch on the two exact
  meridians, which keeps ``|yaw| <= pi/2`` but mirrors the ring slot labels
  across ``phi = pi``: the rotated kernel there samples the same nine
  directions with ring slots rotated by four positions.
* :func:`continuous_rotation_angles` -- one formula for every longitude.  It
  agrees with the piecewise scheme on ``phi < pi`` and keeps slot labels
  consistent globally: kernels at equal latitude differ exactly by a rotation
  about Z.  LUT compilation uses this scheme so the compiled operator commutes
  with column rolls.

Slot names (frozen; index into the 9-point array):

====== ============ =========================================
index  name         realized step at mid latitudes
====== ============ =========================================
0      mid          the pixel itself
1      down         +theta (south)
2      right_down   south-east
3      right        +phi (east)
4      right_up     north-east
5      up           -theta (north)
6      left_up      north-west
7      left         -phi (west; wraps the seam at column 0)
8      left_down    south-west
====== ============ =========================================
"""

from __future__ import annotations

import numpy as np

from .geometry import TWO_PI, ErpGrid

KERNEL_POINT_NAMES = (
    "mid",
    "down",
    "right_down",
    "right",
    "right_up",
    "up",
    "left_up",
    "left",
    "left_down",
)

RING_AZIMUTH_START = np.pi / 2
RING_AZIMUTH_STEP = np.pi / 4


def base_pattern(grid: ErpGrid) -> np.ndarray:
    """The 9 base kernel points at the north pole, shape (9, 3).

    Row 0 is the pole; rows 1..8 are the ring of angular radius
    ``alpha = 2*pi / W`` at azimuths ``pi/2 + k*pi/4``.
    """
    alpha = ring_radius(grid)
    psi = RING_AZIMUTH_START + RING_AZIMUTH_STEP * np.arange(8)
    ring = np.stack(
        [
            np.sin(alpha) * np.cos(psi),
            np.sin(alpha) * np.sin(psi),
            np.full(8, np.cos(alpha)),
        ],
        axis=1,
    )
    return np.vstack([np.array([[0.0, 0.0, 1.0]]), ring])


def ring_radius(grid: ErpGrid) -> float:
    """Angular radius of the kernel ring: one equatorial pixel pitch."""
    if grid.width < 4:
        raise ValueError("width < 4 would give a ring radius beyond pi/2")
    return TWO_PI / grid.width


def rotation_angles(theta, phi):
    """Piecewise (yaw, pitch, roll) carrying the pole to ``(theta, phi)``.

    Four cases on the normalized azimuth: ``phi < pi`` rolls by ``-theta``
    then yaws by ``phi - pi/2``; ``phi > pi`` rolls by ``+theta`` then yaws by
    ``phi - 3*pi/2``; the exact ``phi = pi`` / ``phi = 0`` meridians use a
    pure pitch of ``-theta`` / ``+theta``.  Comparisons are exact; pixel
    centers never hit the two meridian cases.
    """
    theta = np.asarray(theta, dtype=np.float64)
    phi = np.asarray(phi, dtype=np.float64)
    yaw = np.where(phi < np.pi, phi - np.pi / 2, phi - np.pi - np.pi / 2)
    pitch = np.zeros_like(theta)
    roll = np.where(phi < np.pi, -theta, theta)
    on_pi = phi == np.pi
    on_zero = phi == 0.0
    meridian = on_pi | on_zero
    yaw = np.where(meridian, 0.0, yaw)
    roll = np.where(meridian, 0.0, roll)
    pitch = np.where(on_pi, -theta, pitch)
    pitch = np.where(on_zero, theta, pitch)
    return yaw, pitch, roll


def continuous_rotation_angles(theta, phi):
    """Single-branch (yaw, pitch, roll): smooth in longitude.

    ``yaw = phi - pi/2, pitch = 0, roll = -theta`` everywhere, so rotations at
    equal latitude differ by a pure Z-rotation and ring slot labels agree
    across the whole longitude range.
    """
    theta = np.asarray(theta, dtype=np.float64)
    phi = np.asarray(phi, dtype=np.float64)
    return phi - np.pi / 2, np.zeros_like(theta), -theta


def rotation_matrix(yaw, pitch, roll) -> np.ndarray:
    """``R = R_Z(yaw) @ R_Y(pitch) @ R_X(roll)``, batched over leading dims.

    Returns shape ``(..., 3, 3)`` for array inputs, ``(3, 3)`` for scalars.
    """
    yaw = np.asarray(yaw, dtype=np.float64)
    pitch = np.asarray(pitch, dtype=np.float64)
    roll = np.asarray(roll, dtype=np.float64)
    cy, sy = np.cos(yaw), np.sin(yaw)
    cp, sp = np.cos(pitch), np.sin(pitch)
    cr, sr = np.cos(roll), np.sin(roll)
    zero = np.zeros_like(cy)
    one = np.ones_like(cy)
    rz = np.stack(
        [cy, -sy, zero, sy, cy, zero, zero, zero, one], axis=-1
    ).reshape(yaw.shape + (3, 3))
    ry = np.stack(
        [cp, zero, sp, zero, one, zero, -sp, zero, cp], axis=-1
    ).reshape(pitch.shape + (3, 3))
    rx = np.stack(
        [one, zero, zero, zero, cr, -sr, zero, sr, cr], axis=-1
    ).reshape(roll.shape + (3, 3))
    return rz @ ry @ rx


def kernel_at(theta, phi, pattern: np.ndarray, angles_fn=rotation_angles) -> np.ndarray:
    """Rotate the base pattern to the sphere point ``(theta, phi)``.

    Returns the 9 kernel points, shape ``(..., 9, 3)``; point 0 coincides with
    the pixel's own direction.  ``angles_fn`` selects the rotation scheme.
    """
    yaw, pitch, roll = angles_fn(theta, phi)
    rot = rotation_matrix(yaw, pitch, roll)
    return np.einsum("...ij,kj->...ki", rot, pattern)
