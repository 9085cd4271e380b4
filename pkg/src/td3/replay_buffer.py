#!/usr/bin/env python3
"""Fixed-capacity FIFO replay memory with uniform sampling."""

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray


@dataclass(frozen=True)
class Batch:
    states: NDArray[np.float64]
    actions: NDArray[np.float64]
    rewards: NDArray[np.float64]
    next_states: NDArray[np.float64]
    dones: NDArray[np.float64]

    def __len__(self) -> int:
        return self.rewards.shape[0]


class ReplayBuffer:
    """Ring buffer of (s, a, r, s', d); once full, each insert evicts the oldest."""

    def __init__(self, capacity: int, obs_dim: int, action_dim: int):
        if capacity < 1:
            raise ValueError(f"Replay capacity must be >= 1, got {capacity}")
        self.capacity = int(capacity)
        self.states = np.zeros((capacity, obs_dim))
        self.actions = np.zeros((capacity, action_dim))
        self.rewards = np.zeros(capacity)
        self.next_states = np.zeros((capacity, obs_dim))
        self.dones = np.zeros(capacity)
        self._next = 0
        self._size = 0

    def __len__(self) -> int:
        return self._size

    def add(self, state, action, reward: float, next_state, done: bool) -> None:
        i = self._next
        self.states[i] = state
        self.actions[i] = action
        self.rewards[i] = reward
        self.next_states[i] = next_state
        self.dones[i] = 1.0 if done else 0.0
        self._next = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def _take(self, idx: NDArray[np.int64]) -> Batch:
        return Batch(
            self.states[idx].copy(),
            self.actions[idx].copy(),
            self.rewards[idx].copy(),
            self.next_states[idx].copy(),
            self.dones[idx].copy(),
        )

    def sample(self, batch_size: int, rng: np.random.Generator) -> Batch:
        if self._size < batch_size:
            raise ValueError(
                f"Cannot sample {batch_size} transitions from a buffer holding {self._size}"
            )
        return self._take(rng.integers(0, self._size, size=batch_size))

    def transitions(self) -> Batch:
        """Everything stored, oldest first."""
        start = self._next if self._size == self.capacity else 0
        idx = (start + np.arange(self._size)) % self.capacity
        return self._take(idx)
