"""Training losses: reverse Huber on masked depth, MSE latent matching."""

from __future__ import annotations

import numpy as np


def berhu_loss(pred: np.ndarray, gt: np.ndarray, mask: np.ndarray) -> float:
    """Reverse Huber over valid pixels.

    With e = pred - gt on the mask and threshold c = 0.2 * max|e|: absolute
    error below c, (e^2 + c^2) / (2c) above it; mean over valid pixels.
    Returns 0 when every error is exactly zero.
    """
    return _berhu(pred, gt, mask, want_grad=False)[0]


def berhu_loss_grad(pred: np.ndarray, gt: np.ndarray, mask: np.ndarray):
    """(loss, d loss / d pred).

    The threshold c depends on the errors, so the gradient carries an extra
    term at the max-|e| pixel; without it a finite-difference check fails
    there.
    """
    return _berhu(pred, gt, mask, want_grad=True)


def _berhu(pred, gt, mask, want_grad):
    if pred.shape != gt.shape or pred.shape != mask.shape:
        raise ValueError("berhu: pred/gt/mask shapes must match")
    valid = mask > 0.0
    n = int(valid.sum())
    if n == 0:
        raise ValueError("berhu: empty mask")
    e = np.where(valid, pred - gt, 0.0)
    ae = np.abs(e)
    amax_flat = int(np.argmax(ae))
    emax = ae.flat[amax_flat]
    c = 0.2 * emax
    if c == 0.0:
        return 0.0, np.zeros_like(pred)
    quad = ae > c
    terms = np.where(quad, (e * e + c * c) / (2.0 * c), ae)
    loss = float(np.where(valid, terms, 0.0).sum() / n)
    if not want_grad:
        return loss, None
    grad = np.where(quad, e / c, np.sign(e)) / n
    grad[~valid] = 0.0
    # d loss / dc through the quadratic branch, then dc/de at the argmax pixel
    dl_dc = float(((c * c - e[quad] ** 2) / (2.0 * c * c)).sum() / n)
    grad.flat[amax_flat] += dl_dc * 0.2 * np.sign(e.flat[amax_flat])
    return loss, grad


def latent_match_loss_grad(student_latent: np.ndarray, teacher_latent: np.ndarray):
    """Mean squared distance between latents and its gradient w.r.t. the student."""
    if student_latent.shape != teacher_latent.shape:
        raise ValueError("latent shapes must match")
    d = student_latent - teacher_latent
    loss = float(np.mean(d * d))
    return loss, 2.0 * d / d.size
