"""Command-line interface.

Exit codes: 0 success, 2 usage/input error, 3 shape or format mismatch,
4 numerical failure (non-finite loss).
"""

from __future__ import annotations

import click
import numpy as np

from .geometry import ErpGrid, grid_angles
from .imgio import PfmFormatError, PpmFormatError, read_ppm, write_pfm, write_ppm
from .lut import (
    KernelLut,
    LutChecksumError,
    LutFormatError,
    compile_lut,
    load_lut,
    save_lut,
)
from .kernel import KERNEL_POINT_NAMES
from .metrics import METRIC_COLUMNS, evaluate, mean_metrics
from .model import StudentNet, TeacherNet
from .nn.checkpoint import (
    CheckpointChecksumError,
    CheckpointFormatError,
    load_checkpoint,
    restore_parameters,
    save_checkpoint,
)
from .sconv import WEIGHT_PRESETS, preset_layer
from .synth import load_dataset, make_dataset, write_dataset
from .training import (
    NumericalDivergenceError,
    TrainConfig,
    load_config,
    merge_config,
    train_student,
    train_teacher,
    write_loss_csv,
)

FORMAT_ERRORS = (
    LutFormatError,
    LutChecksumError,
    PpmFormatError,
    PfmFormatError,
    CheckpointFormatError,
    CheckpointChecksumError,
)


class MismatchError(click.ClickException):
    exit_code = 3


class NumericalError(click.ClickException):
    exit_code = 4


def _grid(height: int, width: int) -> ErpGrid:
    try:
        return ErpGrid(height, width)
    except ValueError as exc:
        raise click.UsageError(str(exc))


@click.group()
def main():
    """Spherical convolution toolkit for equirectangular panoramas."""


def _lut_build(height: int, width: int, out: str) -> None:
    grid = _grid(height, width)
    save_lut(compile_lut(grid), out)
    click.echo(f"wrote {out} ({height}x{width}, 9 tables)")


@main.command("lut-build")
@click.option("--height", type=int, required=True)
@click.option("--width", type=int, required=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def lut_build(height, width, out):
    """Compile the per-pixel kernel tables and write the binary LUT file."""
    _lut_build(height, width, out)


@main.group("lut")
def lut_group():
    """LUT subcommands (alias group: `sphereconv lut build`)."""


@lut_group.command("build")
@click.option("--height", type=int, required=True)
@click.option("--width", type=int, required=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def lut_build_alias(height, width, out):
    """Same as `sphereconv lut-build`."""
    _lut_build(height, width, out)


@main.command("kernel-show")
@click.option("--height", type=int, required=True)
@click.option("--width", type=int, required=True)
@click.option("--row", type=int, required=True)
@click.option("--col", type=int, required=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True,
              help="PPM with the 9 sample pixels marked")
def kernel_show(height, width, row, col, out):
    """Print the 9 kernel sample pixels of one pixel and render them."""
    grid = _grid(height, width)
    if not (0 <= row < grid.height and 0 <= col < grid.width):
        raise click.UsageError(f"pixel ({row}, {col}) out of bounds for {height}x{width}")
    lut = compile_lut(grid)
    entries = lut.tables[:, row * grid.width + col]
    vs, us = entries // grid.width, entries % grid.width

    theta, _ = grid_angles(grid)
    shade = 0.25 + 0.5 * np.sin(theta)  # latitude shading: bright equator
    img = np.repeat(shade[None, :, :], 3, axis=0)
    for k, (v, u) in enumerate(zip(vs, us)):
        img[:, v, u] = (1.0, 0.0, 0.0) if k == 0 else (0.0, 1.0, 0.0)
    write_ppm(out, img)

    click.echo("name,row,col")
    for name, v, u in zip(KERNEL_POINT_NAMES, vs, us):
        click.echo(f"{name},{v},{u}")


@main.command("conv-apply")
@click.option("--lut", "lut_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--in", "in_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.option("--weights", type=click.Choice(sorted(WEIGHT_PRESETS)), default="average")
def conv_apply(lut_path, in_path, out, weights):
    """Run one spherical convolution with a named weight preset on a PPM."""
    try:
        lut = load_lut(lut_path)
        rgb = read_ppm(in_path)
    except FORMAT_ERRORS as exc:
        raise MismatchError(str(exc))
    if rgb.shape[1:] != lut.grid.shape:
        raise MismatchError(
            f"image {rgb.shape[1]}x{rgb.shape[2]} does not match LUT "
            f"{lut.grid.height}x{lut.grid.width}"
        )
    layer = preset_layer(lut, rgb.shape[0], weights)
    write_pfm(out, layer.forward(rgb))
    click.echo(f"wrote {out}")


@main.command("synth")
@click.option("--count", type=int, required=True)
@click.option("--height", type=int, default=64, show_default=True)
@click.option("--width", type=int, default=128, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(file_okay=False), required=True)
def synth(count, height, width, seed, out):
    """Render a procedural box-room RGB-D dataset."""
    if count < 1:
        raise click.UsageError("--count must be >= 1")
    grid = _grid(height, width)
    samples = make_dataset(count, grid, seed)
    write_dataset(samples, out, seed, grid)
    click.echo(f"wrote {count} scenes to {out}")


def _load_training_data(data_dir):
    try:
        samples, meta = load_dataset(data_dir)
    except FileNotFoundError as exc:
        raise click.UsageError(str(exc))
    except FORMAT_ERRORS as exc:
        raise MismatchError(str(exc))
    height = int(meta["height"])
    if int(meta["width"]) != 2 * height or height % 8:
        raise MismatchError(f"dataset grid {meta['height']}x{meta['width']} unsupported")
    return samples, height


def _resolve_config(config_path, **flags) -> TrainConfig:
    cfg = TrainConfig()
    if config_path:
        try:
            cfg = load_config(config_path)
        except ValueError as exc:
            raise click.UsageError(str(exc))
    return merge_config(cfg, **flags)


@main.command("train-teacher")
@click.option("--data", "data_dir", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--steps", type=int, default=None, help="Adam steps (default 500)")
@click.option("--lr", type=float, default=None, help="learning rate (default 1e-4)")
@click.option("--seed", type=int, default=None)
@click.option("--loss-csv", type=click.Path(dir_okay=False))
def train_teacher_cmd(data_dir, out, config_path, steps, lr, seed, loss_csv):
    """Train the ground-truth-depth autoencoder and save its checkpoint."""
    samples, height = _load_training_data(data_dir)
    cfg = _resolve_config(config_path, steps=steps, lr=lr, seed=seed)
    try:
        net, losses = train_teacher(
            samples, steps=cfg.resolved_steps(len(samples)), lr=cfg.lr,
            seed=cfg.seed, height=height,
        )
    except NumericalDivergenceError as exc:
        raise NumericalError(str(exc))
    save_checkpoint(net.parameters(), out)
    if loss_csv:
        write_loss_csv(loss_csv, losses)
    click.echo(f"final loss {losses[-1]:.6f}; wrote {out}")


@main.command("train-student")
@click.option("--data", "data_dir", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.option("--teacher", "teacher_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--steps", type=int, default=None, help="Adam steps (default 500)")
@click.option("--lr", type=float, default=None, help="learning rate (default 1e-4)")
@click.option("--seed", type=int, default=None)
@click.option("--lambda-distill", "lambda_distill", type=float, default=None,
              help="latent distillation weight (default 0.1)")
@click.option("--fusion", type=click.Choice(["banded", "concat"]), default=None)
@click.option("--band-fraction", "band_fraction", type=float, default=None)
@click.option("--augment-yaw", "augment_yaw", is_flag=True, default=None)
@click.option("--loss-csv", type=click.Path(dir_okay=False))
def train_student_cmd(data_dir, out, teacher_path, config_path, steps, lr, seed,
                      lambda_distill, fusion, band_fraction, augment_yaw, loss_csv):
    """Train the panorama depth estimator, optionally distilling a teacher."""
    samples, height = _load_training_data(data_dir)
    cfg = _resolve_config(config_path, steps=steps, lr=lr, seed=seed,
                          lambda_distill=lambda_distill, fusion=fusion,
                          band_fraction=band_fraction, augment_yaw=augment_yaw)
    teacher = None
    if cfg.lambda_distill > 0.0:
        if not teacher_path:
            raise click.UsageError("--teacher is required when lambda_distill > 0")
        teacher = TeacherNet(seed=0, height=height)
        try:
            restore_parameters(teacher.parameters(), load_checkpoint(teacher_path))
        except FORMAT_ERRORS as exc:
            raise MismatchError(str(exc))
    try:
        net, losses = train_student(
            samples, teacher=teacher, lambda_distill=cfg.lambda_distill,
            steps=cfg.resolved_steps(len(samples)), lr=cfg.lr, seed=cfg.seed,
            height=height, fusion=cfg.fusion, band_fraction=cfg.band_fraction,
            augment_yaw=bool(cfg.augment_yaw),
        )
    except NumericalDivergenceError as exc:
        raise NumericalError(str(exc))
    save_checkpoint(net.parameters(), out)
    if loss_csv:
        write_loss_csv(loss_csv, losses)
    click.echo(f"final loss {losses[-1]:.6f}; wrote {out}")


@main.command("eval")
@click.option("--data", "data_dir", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--checkpoint", "ckpt_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--out", type=click.Path(dir_okay=False), help="metrics CSV")
@click.option("--min-depth", type=float, default=1e-3, show_default=True)
def eval_cmd(data_dir, ckpt_path, out, min_depth):
    """Evaluate a checkpoint on a dataset; prints the seven metrics as CSV."""
    samples, height = _load_training_data(data_dir)
    try:
        state = load_checkpoint(ckpt_path)
    except FORMAT_ERRORS as exc:
        raise MismatchError(str(exc))
    try:
        if "sph1.group_weights" in state:  # student checkpoints carry the spherical branch
            fusion = "banded" if "fuse1.w0" in state else "concat"
            net = StudentNet(seed=0, height=height, fusion=fusion)
            restore_parameters(net.parameters(), state)
            per = []
            for s in samples:
                pred, _ = net.forward(s.rgb)
                per.append(evaluate(np.maximum(pred, min_depth), s.depth, s.mask))
        else:
            net = TeacherNet(seed=0, height=height)
            restore_parameters(net.parameters(), state)
            per = []
            for s in samples:
                recon, _ = net.forward(s.depth)
                per.append(evaluate(np.maximum(recon, min_depth), s.depth, s.mask))
    except (CheckpointFormatError, ValueError) as exc:
        raise MismatchError(str(exc))
    m = mean_metrics(per)
    header = ",".join(METRIC_COLUMNS)
    line = m.csv_line()
    if out:
        with open(out, "w") as f:
            f.write(header + "\n" + line + "\n")
    click.echo(header)
    click.echo(line)


if __name__ == "__main__":
    main()
