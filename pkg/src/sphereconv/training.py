"""Training loops for the teacher autoencoder and the distilled student.

Both loops run single-sample steps (batch size 1) with Adam, visit the
dataset in a seeded order reshuffled each epoch, and are bit-deterministic
for a fixed seed.  The teacher reconstructs ground-truth depth under the
reverse-Huber loss; the student minimizes reverse-Huber on its prediction
plus ``lambda_distill`` times the mean squared distance between its deepest
latent and the frozen teacher's latent of the ground truth.  With
``lambda_distill == 0`` the distillation path is skipped entirely, so the run
is bit-identical to plain supervised training.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .model import StudentNet, TeacherNet
from .nn.losses import berhu_loss_grad, latent_match_loss_grad
from .nn.optim import Adam
from .synth import RgbdSample, yaw_roll


class NumericalDivergenceError(RuntimeError):
    """Loss became NaN/Inf during training."""


@dataclass(frozen=True)
class TrainConfig:
    seed: int = 0
    steps: int = 500
    epochs: int = 0          # when > 0, overrides steps as epochs * len(dataset)
    lr: float = 1e-4
    lambda_distill: float = 0.1
    band_fraction: float = 1.0 / 3.0
    fusion: str = "banded"
    augment_yaw: bool = False

    def resolved_steps(self, n_samples: int) -> int:
        return self.epochs * n_samples if self.epochs > 0 else self.steps


_CONFIG_TYPES = {
    "seed": int,
    "steps": int,
    "epochs": int,
    "lr": float,
    "lambda_distill": float,
    "band_fraction": float,
    "fusion": str,
    "augment_yaw": lambda v: v.lower() in ("1", "true", "yes"),
}


def load_config(path) -> TrainConfig:
    """Parse a plain-text key=value config file ('#' starts a comment)."""
    values = {}
    with open(path) as f:
        for lineno, line in enumerate(f, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, raw = line.partition("=")
            key = key.strip()
            if not sep or key not in _CONFIG_TYPES:
                raise ValueError(f"{path}:{lineno}: bad config line {line!r}")
            values[key] = _CONFIG_TYPES[key](raw.strip())
    return TrainConfig(**values)


def merge_config(cfg: TrainConfig, **overrides) -> TrainConfig:
    """Apply non-None overrides (CLI flags beat the config file)."""
    updates = {k: v for k, v in overrides.items() if v is not None}
    return replace(cfg, **updates) if updates else cfg


def _sample_order(rng: np.random.Generator, n: int, steps: int) -> np.ndarray:
    order = []
    while len(order) < steps:
        order.extend(rng.permutation(n).tolist())
    return np.asarray(order[:steps])


def _check_finite(loss: float, step: int) -> None:
    if not np.isfinite(loss):
        raise NumericalDivergenceError(f"non-finite loss {loss} at step {step}")


def train_teacher(samples: list[RgbdSample], steps: int = 500, lr: float = 5e-3,
                  seed: int = 0, height: int = 64,
                  lr_half_life: int | None = 150) -> tuple[TeacherNet, list[float]]:
    """Fit the depth autoencoder; returns the net and the per-step loss curve.

    ``lr_half_life`` halves the learning rate every that many steps (None
    keeps it constant); the decay buys final reconstruction accuracy at desk
    scale.
    """
    if not samples:
        raise ValueError("empty dataset")
    net = TeacherNet(seed=seed, height=height)
    opt = Adam(net.parameters(), lr=lr)
    rng = np.random.default_rng(seed)
    order = _sample_order(rng, len(samples), steps)
    losses = []
    for step, idx in enumerate(order):
        if lr_half_life:
            opt.lr = lr * 0.5 ** (step / lr_half_life)
        s = samples[idx]
        recon, _ = net.forward(s.depth)
        loss, dgrad = berhu_loss_grad(recon, s.depth, s.mask)
        _check_finite(loss, step)
        opt.zero_grad()
        net.backward(dgrad)
        opt.step()
        losses.append(loss)
    return net, losses


def train_student(samples: list[RgbdSample], teacher: TeacherNet | None = None,
                  lambda_distill: float = 0.1, steps: int = 300, lr: float = 3e-3,
                  seed: int = 0, height: int = 64, fusion: str = "banded",
                  band_fraction: float = 1.0 / 3.0, augment_yaw: bool = False,
                  lr_half_life: int | None = 150,
                  lut_cache_dir=None) -> tuple[StudentNet, list[float]]:
    """Fit the depth estimator, optionally distilling from a frozen teacher.

    The teacher sees only ground truth and only during training; inference
    (StudentNet.forward) never touches it.
    """
    if not samples:
        raise ValueError("empty dataset")
    if lambda_distill > 0.0 and teacher is None:
        raise ValueError("lambda_distill > 0 requires a teacher")
    net = StudentNet(seed=seed, height=height, fusion=fusion,
                     band_fraction=band_fraction, lut_cache_dir=lut_cache_dir)
    opt = Adam(net.parameters(), lr=lr)
    rng = np.random.default_rng(seed)
    order = _sample_order(rng, len(samples), steps)
    width = 2 * height
    losses = []
    for step, idx in enumerate(order):
        if lr_half_life:
            opt.lr = lr * 0.5 ** (step / lr_half_life)
        s = samples[idx]
        if augment_yaw:
            s = yaw_roll(s, int(rng.integers(0, width)))
        pred, latent = net.forward(s.rgb)
        loss, dpred = berhu_loss_grad(pred, s.depth, s.mask)
        dlatent = None
        if lambda_distill > 0.0:
            _, t_latent = teacher.forward(s.depth)
            dist, ddist = latent_match_loss_grad(latent, t_latent)
            loss = loss + lambda_distill * dist
            dlatent = lambda_distill * ddist
        _check_finite(loss, step)
        opt.zero_grad()
        net.backward(dpred, dlatent)
        opt.step()
        losses.append(loss)
    return net, losses


def write_loss_csv(path, losses: list[float]) -> None:
    with open(path, "w") as f:
        f.write("step,loss\n")
        for i, loss in enumerate(losses):
            f.write(f"{i},{loss:.12g}\n")
