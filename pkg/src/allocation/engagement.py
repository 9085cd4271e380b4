#!/usr/bin/env python3
"""Per-cell engagement resolution between defender and intruder densities."""

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from src.montecarlo.capture_table import CaptureTimeTable
from src.montecarlo.harness import PursuitSuite

# Density below which a cell counts as unoccupied
ENGAGEMENT_THRESHOLD = 1e-6


@dataclass(frozen=True)
class UnitScale:
    """How many low-level agents one unit of density stands for, per team."""
    defender_units: float = 100.0
    intruder_units: float = 100.0


@dataclass(frozen=True)
class EngagementOutcome:
    """Per-cell engagement results (arrays aligned with the input cells)."""
    engaged: NDArray[np.bool_]
    ratio: NDArray[np.float64]
    score: NDArray[np.float64]
    destroyed: NDArray[np.float64]

    @property
    def any_engaged(self) -> bool:
        return bool(np.any(self.engaged))

    def mean_score(self, weights: NDArray[np.float64]) -> float:
        """Weighted mean score over engaged cells, 0 when nothing engaged."""
        w = np.where(self.engaged, weights, 0.0)
        total = float(np.sum(w))
        if total <= 0.0:
            return 0.0
        return float(np.sum(w * self.score) / total)


def resolve_engagements(
    defender: ArrayLike,
    intruder: ArrayLike,
    unit_scale: UnitScale,
    table: CaptureTimeTable,
    policy: str = PursuitSuite.PURE_DISTANCE.value,
    orientation: str = "fast",
) -> EngagementOutcome:
    """Resolve the low-level games in every co-occupied cell.

    ratio = (defender * defender_units) / (intruder * intruder_units);
    destroyed intruder mass = intruder * min(1, ratio); the capture score is
    the table score at that ratio (clamped to the table's ratio range).
    Cells where either mass is below 1e-6 do not engage.
    """
    d = np.atleast_1d(np.asarray(defender, dtype=np.float64))
    i = np.atleast_1d(np.asarray(intruder, dtype=np.float64))
    if np.any(d < 0) or np.any(i < 0):
        raise ValueError("Densities must be non-negative")

    engaged = (d >= ENGAGEMENT_THRESHOLD) & (i >= ENGAGEMENT_THRESHOLD)
    ratio = np.zeros_like(d)
    ratio[engaged] = (d[engaged] * unit_scale.defender_units) / (
        i[engaged] * unit_scale.intruder_units
    )

    destroyed = np.where(engaged, i * np.minimum(1.0, ratio), 0.0)
    destroyed = np.minimum(destroyed, i)

    score = np.zeros_like(d)
    for k in np.flatnonzero(engaged):
        score[k] = table.score(float(ratio[k]), policy, orientation)

    return EngagementOutcome(engaged=engaged, ratio=ratio, score=score, destroyed=destroyed)
