"""Input validation helpers for the estimator layer."""

from __future__ import annotations

import numpy as np


def as_sample_stack(X, channels: int, name: str = "X") -> np.ndarray:
    """Coerce to float64 (n, channels, H, W); accepts (n, H, W) when channels==1."""
    X = np.asarray(X, dtype=np.float64)
    if channels == 1 and X.ndim == 3:
        X = X[:, None, :, :]
    if X.ndim != 4 or X.shape[1] != channels:
        raise ValueError(
            f"{name} must have shape (n, {channels}, H, W), got {X.shape}"
        )
    if not np.isfinite(X).all():
        raise ValueError(f"{name} contains non-finite values")
    return X


def check_erp_shape(X: np.ndarray, name: str = "X") -> tuple[int, int]:
    """Spatial dims must be a 1:2 panorama with the ladder-compatible height."""
    h, w = X.shape[-2:]
    if w != 2 * h:
        raise ValueError(f"{name} must be a 1:2 panorama, got {h}x{w}")
    if h % 8:
        raise ValueError(f"{name} height must be divisible by 8, got {h}")
    return h, w


def check_matching_stacks(X: np.ndarray, y: np.ndarray) -> None:
    if X.shape[0] != y.shape[0]:
        raise ValueError(f"X and y disagree on sample count: {X.shape[0]} vs {y.shape[0]}")
    if X.shape[-2:] != y.shape[-2:]:
        raise ValueError(f"X and y disagree on spatial dims: {X.shape} vs {y.shape}")


def check_positive_depth(y: np.ndarray, name: str = "y") -> None:
    if (y <= 0.0).any():
        raise ValueError(f"{name} must be strictly positive depth")
