#!/usr/bin/env python3
"""Capture-time lookup table: pursuer-per-evader ratio x pursuit suite."""

import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from src.game.agents import GameConfig
from src.montecarlo.harness import CaptureStats, McConfig, PursuitSuite, run_mc
from src.monitoring.metrics import timed_operation

logger = logging.getLogger(__name__)

DEFAULT_RATIOS = (1, 3, 5)

# Reference mean capture times (10x10 arena, unit speed, r_c = 0.25)
REFERENCE_MEANS: Dict[str, Dict[int, float]] = {
    PursuitSuite.PURE_DISTANCE.value: {1: 3.373, 3: 2.856, 5: 2.0},
    PursuitSuite.AREA_MIN.value: {1: 3.3103, 3: 3.276, 5: 3.222},
}

SCORE_ORIENTATIONS = ("fast", "literal")

TableKey = Tuple[int, str]


@dataclass
class CaptureTimeTable:
    """Capture statistics per (ratio, policy) cell.

    Normalized values are mean / t_norm with t_norm the largest mean in the
    table, so they lie in (0, 1].
    """
    entries: Dict[TableKey, CaptureStats] = field(default_factory=dict)

    @property
    def t_norm(self) -> float:
        means = [s.mean for s in self.entries.values() if not s.empty]
        if not means:
            raise ValueError("Capture table has no captured runs to normalize by")
        return max(means)

    @property
    def policies(self) -> List[str]:
        return sorted({policy for _, policy in self.entries})

    def knots(self, policy: str) -> List[Tuple[int, float]]:
        """(ratio, mean) pairs for one policy, sorted by ratio."""
        return sorted(
            (ratio, stats.mean)
            for (ratio, p), stats in self.entries.items()
            if p == policy and not stats.empty
        )

    def normalized(self, ratio: int, policy: str) -> float:
        stats = self.entries[(ratio, policy)]
        if stats.empty:
            raise KeyError(f"No captured runs for ratio {ratio}, policy {policy}")
        return stats.mean / self.t_norm

    def interpolate_mean(self, ratio: float, policy: str) -> float:
        """Piecewise-linear mean capture time in the ratio, clamped at the end knots."""
        knots = self.knots(policy)
        if not knots:
            raise KeyError(f"Capture table has no entries for policy {policy}")
        ratios = np.array([r for r, _ in knots], dtype=np.float64)
        means = np.array([m for _, m in knots], dtype=np.float64)
        return float(np.interp(ratio, ratios, means))

    def score(self, ratio: float, policy: str, orientation: str = "fast") -> float:
        """Normalized capture score in (0, 1] at an arbitrary ratio.

        literal: mean / t_norm, so slower captures score higher.
        fast:    1 - mean / t_norm + min_mean / t_norm, so the fastest cell scores 1.
        """
        t_norm = self.t_norm
        value = self.interpolate_mean(ratio, policy) / t_norm
        if orientation == "literal":
            return value
        if orientation == "fast":
            fastest = min(s.mean for s in self.entries.values() if not s.empty)
            return 1.0 - value + fastest / t_norm
        raise ValueError(f"Unknown score orientation '{orientation}'")

    def to_records(self) -> List[Dict]:
        records = []
        for (ratio, policy), stats in sorted(self.entries.items()):
            records.append({
                'policy': policy,
                'ratio': int(ratio),
                'mean': stats.mean,
                'std': stats.std,
                'min': stats.min,
                'max': stats.max,
                'n': stats.n_captured,
            })
        return records

    @classmethod
    def from_records(cls, records: Iterable[Dict]) -> "CaptureTimeTable":
        entries = {}
        for record in records:
            n = int(record['n'])
            entries[(int(record['ratio']), str(record['policy']))] = CaptureStats(
                mean=record['mean'],
                std=record['std'],
                min=record['min'],
                max=record['max'],
                timeout_count=0,
                n_runs=n,
            )
        return cls(entries)

    @classmethod
    def from_means(cls, means: Dict[str, Dict[int, float]]) -> "CaptureTimeTable":
        """Table of single-value cells, one per (policy, ratio) mean."""
        entries = {
            (ratio, policy): CaptureStats(mean, 0.0, mean, mean, 0, 1)
            for policy, by_ratio in means.items()
            for ratio, mean in by_ratio.items()
        }
        return cls(entries)

    @classmethod
    def reference(cls) -> "CaptureTimeTable":
        return cls.from_means(REFERENCE_MEANS)

    def save(self, path: Path | str) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        document = {'t_norm': self.t_norm, 'entries': self.to_records()}
        with open(path, 'w', encoding='utf-8') as file:
            json.dump(document, file, indent=2)
        logger.info(f"Saved capture table with {len(self.entries)} cells to {path}")
        return path

    @classmethod
    def load(cls, path: Path | str) -> "CaptureTimeTable":
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Capture table not found: {path}")
        with open(path, 'r', encoding='utf-8') as file:
            document = json.load(file)
        records = document['entries'] if isinstance(document, dict) else document
        return cls.from_records(records)


@timed_operation("montecarlo.build_capture_table")
def build_capture_table(
    policies: Sequence[PursuitSuite],
    ratios: Sequence[int] = DEFAULT_RATIOS,
    cfg: Optional[McConfig] = None,
    game: Optional[GameConfig] = None,
    workers: int = 1,
    path: Optional[Path | str] = None,
    progress: bool = False,
) -> CaptureTimeTable:
    """One Monte-Carlo batch per (ratio, policy) cell.

    A ratio r means r pursuers per evader. The table is written to `path`
    when one is given.
    """
    base = cfg or McConfig()
    entries: Dict[TableKey, CaptureStats] = {}
    for policy in policies:
        for ratio in ratios:
            cell_cfg = replace(
                base,
                suite=PursuitSuite(policy),
                n_pursuers=int(ratio) * base.n_evaders,
                pursuer_policy=None,
                evader_policy=None,
            )
            entries[(int(ratio), PursuitSuite(policy).value)] = run_mc(
                cell_cfg, game=game, workers=workers, progress=progress
            )
    table = CaptureTimeTable(entries)
    if path is not None:
        table.save(path)
    return table
