"""Scikit-learn style wrappers around the training loops.

Both classes follow the sklearn estimator contract: ``__init__`` only stores
hyperparameters verbatim (so ``get_params``/``set_params``/``clone`` work),
``fit`` validates inputs and trains, fitted state lives in
trailing-underscore attributes.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .metrics import DepthMetrics, evaluate, mean_metrics
from .synth import RgbdSample
from .training import train_student, train_teacher
from .validation import (
    as_sample_stack,
    check_erp_shape,
    check_matching_stacks,
    check_positive_depth,
)


def _to_samples(rgb: np.ndarray, depth: np.ndarray) -> list[RgbdSample]:
    return [
        RgbdSample(rgb=r, depth=d, mask=np.ones_like(d))
        for r, d in zip(rgb, depth)
    ]


class TeacherDepthAutoencoder(BaseEstimator):
    """Depth-map autoencoder; ``transform`` yields the deepest latent code.

    Parameters
    ----------
    steps : number of single-sample Adam steps.
    lr : learning rate (desk-scale default; the CLI defaults to 1e-4).
    seed : controls init and data order; fixed seed gives bit-identical fits.
    """

    def __init__(self, steps: int = 500, lr: float = 1e-2, seed: int = 0):
        self.steps = steps
        self.lr = lr
        self.seed = seed

    def fit(self, X, y=None):
        X = as_sample_stack(X, channels=1, name="X")
        h, _ = check_erp_shape(X)
        check_positive_depth(X, "X")
        samples = [
            RgbdSample(rgb=None, depth=d, mask=np.ones_like(d)) for d in X
        ]
        self.net_, self.loss_curve_ = train_teacher(
            samples, steps=self.steps, lr=self.lr, seed=self.seed, height=h
        )
        self.height_ = h
        return self

    def transform(self, X) -> np.ndarray:
        self._check_fitted()
        X = as_sample_stack(X, channels=1, name="X")
        return np.stack([self.net_.forward(d)[1] for d in X])

    def reconstruct(self, X) -> np.ndarray:
        self._check_fitted()
        X = as_sample_stack(X, channels=1, name="X")
        return np.stack([self.net_.forward(d)[0] for d in X])

    def reconstruction_metrics(self, X, min_depth: float = 1e-3) -> DepthMetrics:
        """Mean per-sample metrics of reconstruction against the input."""
        X = as_sample_stack(X, channels=1, name="X")
        recons = self.reconstruct(X)
        per = [
            evaluate(np.maximum(r, min_depth), d, np.ones_like(d))
            for r, d in zip(recons, X)
        ]
        return mean_metrics(per)

    def _check_fitted(self):
        if not hasattr(self, "net_"):
            raise RuntimeError("TeacherDepthAutoencoder is not fitted")


class SphericalDepthEstimator(BaseEstimator):
    """Panoramic RGB -> metric depth with optional latent distillation.

    Parameters
    ----------
    teacher : fitted :class:`TeacherDepthAutoencoder` or None.  Used only
        during ``fit`` (never at prediction time) when ``lambda_distill > 0``.
    lambda_distill : weight of the latent-matching term.
    fusion : "banded" (adaptive weights + mid-latitude band retention) or
        "concat" (plain concatenation; the ablation variant).
    min_depth : floor applied to predictions so log metrics stay finite.
    """

    def __init__(self, teacher=None, lambda_distill: float = 0.1,
                 steps: int = 300, lr: float = 3e-3, seed: int = 0,
                 fusion: str = "banded", band_fraction: float = 1.0 / 3.0,
                 min_depth: float = 1e-3, augment_yaw: bool = False):
        self.teacher = teacher
        self.lambda_distill = lambda_distill
        self.steps = steps
        self.lr = lr
        self.seed = seed
        self.fusion = fusion
        self.band_fraction = band_fraction
        self.min_depth = min_depth
        self.augment_yaw = augment_yaw

    def fit(self, X, y):
        X = as_sample_stack(X, channels=3, name="X")
        y = as_sample_stack(y, channels=1, name="y")
        check_matching_stacks(X, y)
        check_positive_depth(y)
        h, _ = check_erp_shape(X)
        teacher_net = None
        if self.lambda_distill > 0.0:
            if self.teacher is None or not hasattr(self.teacher, "net_"):
                raise ValueError("lambda_distill > 0 requires a fitted teacher")
            teacher_net = self.teacher.net_
        self.net_, self.loss_curve_ = train_student(
            _to_samples(X, y),
            teacher=teacher_net,
            lambda_distill=self.lambda_distill,
            steps=self.steps,
            lr=self.lr,
            seed=self.seed,
            height=h,
            fusion=self.fusion,
            band_fraction=self.band_fraction,
            augment_yaw=self.augment_yaw,
        )
        self.height_ = h
        return self

    def predict(self, X) -> np.ndarray:
        """Depth maps (n, 1, H, W), clamped to ``min_depth``."""
        self._check_fitted()
        X = as_sample_stack(X, channels=3, name="X")
        return np.stack(
            [np.maximum(self.net_.forward(r)[0], self.min_depth) for r in X]
        )

    def latent(self, X) -> np.ndarray:
        self._check_fitted()
        X = as_sample_stack(X, channels=3, name="X")
        return np.stack([self.net_.forward(r)[1] for r in X])

    def evaluate(self, X, y) -> DepthMetrics:
        """Mean per-sample depth metrics on (X, y)."""
        y = as_sample_stack(y, channels=1, name="y")
        check_positive_depth(y)
        preds = self.predict(X)
        per = [
            evaluate(p, d, np.ones_like(d)) for p, d in zip(preds, y)
        ]
        return mean_metrics(per)

    def _check_fitted(self):
        if not hasattr(self, "net_"):
            raise RuntimeError("SphericalDepthEstimator is not fitted")
