"""Standard monocular depth evaluation metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

METRIC_COLUMNS = ("abs_rel", "sq_rel", "rmse", "rmse_log", "d1", "d2", "d3")


@dataclass(frozen=True)
class DepthMetrics:
    abs_rel: float
    sq_rel: float
    rmse: float
    rmse_log: float
    delta1: float
    delta2: float
    delta3: float

    def as_row(self) -> tuple[float, ...]:
        return (self.abs_rel, self.sq_rel, self.rmse, self.rmse_log,
                self.delta1, self.delta2, self.delta3)

    def csv_line(self) -> str:
        return ",".join(f"{v:.6f}" for v in self.as_row())


def evaluate(pred: np.ndarray, gt: np.ndarray, mask: np.ndarray) -> DepthMetrics:
    """Abs Rel, Sq Rel, RMSE, RMSE(log), and delta accuracies over valid pixels.

    delta_t is the fraction of pixels with max(pred/gt, gt/pred) < t for
    t in {1.25, 1.25^2, 1.25^3}.  Both pred and gt must be strictly positive
    on the mask (the log and the ratios are undefined otherwise); callers
    clamp predictions to a floor before evaluating.
    """
    if pred.shape != gt.shape or pred.shape != mask.shape:
        raise ValueError("evaluate: shapes must match")
    valid = mask > 0.0
    if not valid.any():
        raise ValueError("evaluate: empty mask")
    p = pred[valid]
    g = gt[valid]
    if (g <= 0.0).any():
        raise ValueError("evaluate: non-positive ground truth under log")
    if (p <= 0.0).any():
        raise ValueError("evaluate: non-positive prediction under log")
    diff = p - g
    abs_rel = float(np.mean(np.abs(diff) / g))
    sq_rel = float(np.mean(diff * diff / g))
    rmse = float(np.sqrt(np.mean(diff * diff)))
    dlog = np.log(p) - np.log(g)
    rmse_log = float(np.sqrt(np.mean(dlog * dlog)))
    ratio = np.maximum(p / g, g / p)
    d1 = float(np.mean(ratio < 1.25))
    d2 = float(np.mean(ratio < 1.25 ** 2))
    d3 = float(np.mean(ratio < 1.25 ** 3))
    return DepthMetrics(abs_rel, sq_rel, rmse, rmse_log, d1, d2, d3)


def mean_metrics(per_sample: list[DepthMetrics]) -> DepthMetrics:
    """Average of per-sample metrics (the dataset-level report)."""
    if not per_sample:
        raise ValueError("no metrics to average")
    rows = np.array([m.as_row() for m in per_sample])
    return DepthMetrics(*rows.mean(axis=0))
