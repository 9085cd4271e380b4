#!/usr/bin/env python3
"""Fully connected ReLU networks with hand-written backpropagation."""

from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray

Array = NDArray[np.float64]


class NetworkShapeError(ValueError):
    """Input, gradient or parameter array does not fit the network."""


class OutputActivation(str, Enum):
    IDENTITY = "identity"
    # Sigmoid rescaled onto [low, high]
    SQUASH = "squash"


def relu(z: Array) -> Array:
    return np.maximum(z, 0.0)


def relu_grad(z: Array) -> Array:
    return np.where(z > 0, 1.0, 0.0)


def sigmoid(z: Array) -> Array:
    # Split by sign so large |z| never overflows exp
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass
class ForwardCache:
    """Per-layer inputs and pre-activations remembered for the backward pass."""
    inputs: List[Array]
    pre_activations: List[Array]
    output: Array
    batched: bool


@dataclass
class MlpGrads:
    weights: List[Array]
    biases: List[Array]

    def arrays(self) -> List[Array]:
        return [*self.weights, *self.biases]

    def scaled(self, factor: float) -> "MlpGrads":
        return MlpGrads(
            [w * factor for w in self.weights], [b * factor for b in self.biases]
        )


@dataclass
class Mlp:
    """y = out(W_L relu(... relu(x W_1 + b_1) ...) + b_L)

    weights[l] has shape (sizes[l], sizes[l + 1]); inputs are rows, either a
    single (in,) vector or a (batch, in) matrix.
    """
    sizes: Tuple[int, ...]
    weights: List[Array]
    biases: List[Array]
    output: OutputActivation = OutputActivation.IDENTITY
    low: float = 0.0
    high: float = 1.0

    def __post_init__(self):
        self.sizes = tuple(int(s) for s in self.sizes)
        if len(self.sizes) < 2:
            raise NetworkShapeError("A network needs at least input and output sizes")
        if len(self.weights) != len(self.sizes) - 1 or len(self.biases) != len(self.weights):
            raise NetworkShapeError(
                f"Expected {len(self.sizes) - 1} layers, got "
                f"{len(self.weights)} weights and {len(self.biases)} biases"
            )
        for layer, (w, b) in enumerate(zip(self.weights, self.biases)):
            expected = (self.sizes[layer], self.sizes[layer + 1])
            if w.shape != expected or b.shape != (expected[1],):
                raise NetworkShapeError(
                    f"Layer {layer} has weights {w.shape} and biases {b.shape}, "
                    f"expected {expected} and ({expected[1]},)"
                )
        if self.output is OutputActivation.SQUASH and not self.high > self.low:
            raise NetworkShapeError("Squashed output needs high > low")

    @classmethod
    def initialize(
        cls,
        sizes: Sequence[int],
        rng: np.random.Generator,
        output: OutputActivation = OutputActivation.IDENTITY,
        low: float = 0.0,
        high: float = 1.0,
    ) -> "Mlp":
        """Uniform fan-in initialization: U(-1/sqrt(fan_in), 1/sqrt(fan_in))."""
        weights, biases = [], []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
            biases.append(rng.uniform(-bound, bound, size=fan_out))
        return cls(tuple(sizes), weights, biases, OutputActivation(output), low, high)

    @classmethod
    def zeros(
        cls,
        sizes: Sequence[int],
        output: OutputActivation = OutputActivation.IDENTITY,
        low: float = 0.0,
        high: float = 1.0,
    ) -> "Mlp":
        weights = [np.zeros((i, o)) for i, o in zip(sizes[:-1], sizes[1:])]
        biases = [np.zeros(o) for o in sizes[1:]]
        return cls(tuple(sizes), weights, biases, OutputActivation(output), low, high)

    @property
    def input_size(self) -> int:
        return self.sizes[0]

    @property
    def output_size(self) -> int:
        return self.sizes[-1]

    def parameters(self) -> List[Array]:
        """Weights then biases; the arrays are live, not copies."""
        return [*self.weights, *self.biases]

    def copy(self) -> "Mlp":
        return Mlp(
            self.sizes,
            [w.copy() for w in self.weights],
            [b.copy() for b in self.biases],
            self.output,
            self.low,
            self.high,
        )

    def _as_batch(self, x: Array) -> Tuple[Array, bool]:
        x = np.asarray(x, dtype=np.float64)
        batched = x.ndim == 2
        x2 = x if batched else x.reshape(1, -1)
        if x2.ndim != 2 or x2.shape[1] != self.input_size:
            raise NetworkShapeError(
                f"Network expects inputs of width {self.input_size}, got shape {x.shape}"
            )
        return x2, batched

    def forward(self, x: Array) -> Tuple[Array, ForwardCache]:
        h, batched = self._as_batch(x)
        inputs, pre = [], []
        last = len(self.weights) - 1
        for layer, (w, b) in enumerate(zip(self.weights, self.biases)):
            inputs.append(h)
            z = h @ w + b
            pre.append(z)
            if layer < last:
                h = relu(z)
            elif self.output is OutputActivation.SQUASH:
                h = self.low + (self.high - self.low) * sigmoid(z)
            else:
                h = z
        y = h if batched else h[0]
        return y, ForwardCache(inputs, pre, h, batched)

    def __call__(self, x: Array) -> Array:
        return self.forward(x)[0]

    def backward(self, cache: ForwardCache, dy: Array) -> Tuple[MlpGrads, Array]:
        """Parameter gradients and input gradient for upstream gradient dy.

        Gradients are summed over the batch rows.
        """
        g = np.asarray(dy, dtype=np.float64)
        if not cache.batched:
            g = g.reshape(1, -1)
        if g.shape != cache.output.shape:
            raise NetworkShapeError(
                f"Upstream gradient shape {np.shape(dy)} does not match output "
                f"{cache.output.shape if cache.batched else cache.output.shape[1:]}"
            )

        if self.output is OutputActivation.SQUASH:
            s = (cache.output - self.low) / (self.high - self.low)
            g = g * (self.high - self.low) * s * (1.0 - s)

        n_layers = len(self.weights)
        grad_w: List[Optional[Array]] = [None] * n_layers
        grad_b: List[Optional[Array]] = [None] * n_layers
        for layer in reversed(range(n_layers)):
            if layer < n_layers - 1:
                g = g * relu_grad(cache.pre_activations[layer])
            grad_w[layer] = cache.inputs[layer].T @ g
            grad_b[layer] = g.sum(axis=0)
            g = g @ self.weights[layer].T

        dx = g if cache.batched else g[0]
        return MlpGrads(grad_w, grad_b), dx

    def to_dict(self) -> dict:
        return {
            'sizes': list(self.sizes),
            'output': self.output.value,
            'low': self.low,
            'high': self.high,
            'weights': [w.tolist() for w in self.weights],
            'biases': [b.tolist() for b in self.biases],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Mlp":
        return cls(
            tuple(data['sizes']),
            [np.asarray(w, dtype=np.float64).reshape(i, o)
             for w, i, o in zip(data['weights'], data['sizes'][:-1], data['sizes'][1:])],
            [np.asarray(b, dtype=np.float64) for b in data['biases']],
            OutputActivation(data.get('output', OutputActivation.IDENTITY.value)),
            float(data.get('low', 0.0)),
            float(data.get('high', 1.0)),
        )
