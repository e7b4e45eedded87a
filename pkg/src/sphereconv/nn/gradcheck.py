"""Finite-difference verification of hand-written backward passes."""

from __future__ import annotations

import numpy as np


def numeric_gradient(f, x: np.ndarray, eps: float = 1e-5) -> np.ndarray:
    """Full central-difference gradient of scalar f at x (small arrays only)."""
    g = np.zeros_like(x)
    it = np.nditer(x, flags=["multi_index"])
    while not it.finished:
        idx = it.multi_index
        orig = x[idx]
        x[idx] = orig + eps
        fp = f()
        x[idx] = orig - eps
        fm = f()
        x[idx] = orig
        g[idx] = (fp - fm) / (2.0 * eps)
        it.iternext()
    return g


def sampled_gradient_error(f, x: np.ndarray, analytic: np.ndarray, rng,
                           n_samples: int = 20, eps: float = 1e-5) -> float:
    """Relative error between analytic and central-difference gradients.

    Samples ``n_samples`` coordinates of ``x`` (without replacement when
    possible) and returns ||ga - gn|| / max(||ga|| + ||gn||, 1e-12) over the
    sampled coordinates.  ``f`` is a closure recomputing the scalar objective
    from the current contents of ``x`` (mutated in place and restored).
    """
    flat = x.reshape(-1)
    n = min(n_samples, flat.size)
    idxs = rng.choice(flat.size, size=n, replace=False)
    ga = analytic.reshape(-1)[idxs]
    gn = np.empty(n)
    for j, i in enumerate(idxs):
        orig = flat[i]
        flat[i] = orig + eps
        fp = f()
        flat[i] = orig - eps
        fm = f()
        flat[i] = orig
        gn[j] = (fp - fm) / (2.0 * eps)
    denom = max(float(np.linalg.norm(ga) + np.linalg.norm(gn)), 1e-12)
    return float(np.linalg.norm(ga - gn)) / denom
