"""Spherical convolution on equirectangular panoramas, desk-scale depth pipeline."""

from .geometry import (
    ErpGrid,
    angles_from_point,
    angles_to_pixel,
    grid_directions,
    pixel_to_angles,
    point_from_angles,
)
from .kernel import (
    KERNEL_POINT_NAMES,
    base_pattern,
    continuous_rotation_angles,
    kernel_at,
    ring_radius,
    rotation_angles,
    rotation_matrix,
)
from .lut import KernelLut, compile_lut, get_lut, load_lut, save_lut
from .estimators import SphericalDepthEstimator, TeacherDepthAutoencoder
from .metrics import DepthMetrics, evaluate, mean_metrics
from .model import BandFusion, ConcatFusion, StudentNet, TeacherNet
from .sconv import SphericalConv, gather, gather_backward
from .synth import RgbdSample, RoomScene, make_dataset, render, yaw_roll
from .training import train_student, train_teacher

__version__ = "0.1.0"

__all__ = [
    "BandFusion",
    "ConcatFusion",
    "DepthMetrics",
    "ErpGrid",
    "KERNEL_POINT_NAMES",
    "KernelLut",
    "RgbdSample",
    "RoomScene",
    "SphericalConv",
    "SphericalDepthEstimator",
    "StudentNet",
    "TeacherDepthAutoencoder",
    "TeacherNet",
    "angles_from_point",
    "angles_to_pixel",
    "base_pattern",
    "compile_lut",
    "continuous_rotation_angles",
    "evaluate",
    "gather",
    "gather_backward",
    "get_lut",
    "grid_directions",
    "kernel_at",
    "load_lut",
    "make_dataset",
    "mean_metrics",
    "pixel_to_angles",
    "point_from_angles",
    "render",
    "ring_radius",
    "rotation_angles",
    "rotation_matrix",
    "save_lut",
    "train_student",
    "train_teacher",
    "yaw_roll",
]
