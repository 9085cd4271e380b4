#!/usr/bin/env python3
"""Adam optimizer over a list of numpy parameter arrays."""

from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np
from numpy.typing import NDArray

from src.td3.mlp import NetworkShapeError

DEFAULT_LEARNING_RATE = 1e-3


@dataclass
class Adam:
    """Bias-corrected first/second moment estimates, one pair per parameter array."""
    lr: float = DEFAULT_LEARNING_RATE
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    m: List[NDArray[np.float64]] = field(default_factory=list)
    v: List[NDArray[np.float64]] = field(default_factory=list)
    t: int = 0

    @classmethod
    def for_params(cls, params: Sequence[NDArray[np.float64]], lr: float = DEFAULT_LEARNING_RATE) -> "Adam":
        return cls(lr=lr, m=[np.zeros_like(p) for p in params], v=[np.zeros_like(p) for p in params])

    def step(self, params: Sequence[NDArray[np.float64]], grads: Sequence[NDArray[np.float64]]) -> None:
        """Descend one step along grads, updating params in place."""
        if len(params) != len(self.m) or len(grads) != len(params):
            raise NetworkShapeError(
                f"Optimizer tracks {len(self.m)} arrays, got {len(params)} params "
                f"and {len(grads)} gradients"
            )
        self.t += 1
        correction1 = 1.0 - self.beta1 ** self.t
        correction2 = 1.0 - self.beta2 ** self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= self.lr * (m / correction1) / (np.sqrt(v / correction2) + self.eps)
