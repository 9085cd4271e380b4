#!/usr/bin/env python3
"""Neighbor-restricted, column-stochastic transition matrices over an N x N grid."""

import logging
from functools import lru_cache
from typing import List, Tuple

import numpy as np
from numpy.typing import NDArray
from scipy import sparse

logger = logging.getLogger(__name__)

# Canonical order of (row, col) offsets within each source cell's block
NEIGHBOR_OFFSETS: Tuple[Tuple[int, int], ...] = (
    (-1, -1), (-1, 0), (-1, 1),
    (0, -1), (0, 0), (0, 1),
    (1, -1), (1, 0), (1, 1),
)

ACTION_LOW = 0.0
ACTION_HIGH = 1.0


class AllocationError(ValueError):
    """Base class for allocation-layer failures."""


class GridSizeError(AllocationError):
    """Grid side below the minimum of 2."""


class ActionShapeError(AllocationError):
    """Action vector length does not match the grid."""


class ActionDomainError(AllocationError):
    """Action entry outside [a_low, a_high] or not finite."""


def n_actions(n: int) -> int:
    """Number of (cell, reachable cell) pairs: corners 4, edges 6, interior 9."""
    if n < 2:
        raise GridSizeError(f"Grid side must be >= 2, got {n}")
    return 4 * 4 + 6 * 4 * (n - 2) + 9 * (n - 2) ** 2


@lru_cache(maxsize=16)
def transition_pattern(n: int) -> Tuple[Tuple[int, int], ...]:
    """(destination, source) flat-index pairs in canonical action order.

    Sources run row-major over cells; within a source, destinations follow
    NEIGHBOR_OFFSETS with off-grid offsets skipped.
    """
    n_actions(n)
    pairs: List[Tuple[int, int]] = []
    for row in range(n):
        for col in range(n):
            source = row * n + col
            for d_row, d_col in NEIGHBOR_OFFSETS:
                r, c = row + d_row, col + d_col
                if 0 <= r < n and 0 <= c < n:
                    pairs.append((r * n + c, source))
    return tuple(pairs)


def build_transition(a: NDArray[np.float64], n: int) -> sparse.csc_array:
    """Column-stochastic N^2 x N^2 transition matrix from an action vector.

    Column j holds the outflow of cell j: raw action entries are placed on
    the neighbor pattern and divided by the column sum. A column whose
    entries are all zero becomes a pure self-transition.

    Raises:
        ActionShapeError: len(a) != n_actions(n).
        ActionDomainError: an entry is negative, above 1 or not finite.
    """
    actions = np.asarray(a, dtype=np.float64).ravel()
    expected = n_actions(n)
    if actions.shape[0] != expected:
        raise ActionShapeError(
            f"Action vector for N={n} needs {expected} entries, got {actions.shape[0]}"
        )
    if not np.all(np.isfinite(actions)):
        raise ActionDomainError("Action entries must be finite")
    if np.any(actions < ACTION_LOW) or np.any(actions > ACTION_HIGH):
        raise ActionDomainError(
            f"Action entries must lie in [{ACTION_LOW}, {ACTION_HIGH}]"
        )

    pattern = np.asarray(transition_pattern(n), dtype=np.int64)
    rows, cols = pattern[:, 0], pattern[:, 1]
    size = n * n

    column_sums = np.bincount(cols, weights=actions, minlength=size)
    values = actions.copy()
    live = column_sums[cols] > 0
    values[live] = actions[live] / column_sums[cols][live]

    # Identity fallback for all-zero columns
    dead_cells = np.flatnonzero(column_sums <= 0)
    self_entries = (rows == cols) & np.isin(cols, dead_cells)
    values[self_entries] = 1.0

    return sparse.csc_array((values, (rows, cols)), shape=(size, size))
