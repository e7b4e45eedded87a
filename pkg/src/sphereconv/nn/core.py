"""Dense float64 tensors with a gradient plane, and named trainable parameters."""

from __future__ import annotations

import numpy as np


class Tensor:
    """Value array plus a same-shape gradient accumulator (zero-initialized)."""

    __slots__ = ("values", "grad")

    def __init__(self, values):
        self.values = np.asarray(values, dtype=np.float64)
        self.grad = np.zeros_like(self.values)

    @property
    def shape(self):
        return self.values.shape

    def zero_grad(self):
        self.grad[...] = 0.0


class Parameter:
    """A named, trainable tensor."""

    __slots__ = ("tensor", "name", "trainable")

    def __init__(self, values, name: str, trainable: bool = True):
        self.tensor = Tensor(values)
        self.name = name
        self.trainable = trainable

    @property
    def values(self):
        return self.tensor.values

    @values.setter
    def values(self, v):
        self.tensor.values[...] = v

    @property
    def grad(self):
        return self.tensor.grad

    @grad.setter
    def grad(self, g):
        self.tensor.grad[...] = g

    def zero_grad(self):
        self.tensor.zero_grad()

    def __repr__(self):
        return f"Parameter({self.name}, shape={self.tensor.shape})"


def check_unique_names(params) -> None:
    """Parameter names must be unique within one network."""
    seen = set()
    for p in params:
        if p.name in seen:
            raise ValueError(f"duplicate parameter name: {p.name}")
        seen.add(p.name)
