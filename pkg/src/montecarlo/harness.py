#!/usr/bin/env python3
"""Monte-Carlo capture-time experiments over randomized start positions."""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from src.game.agents import (
    DEFAULT_EVADER_TARGET,
    EVADER_SPAWN_BOX,
    PURSUER_SPAWN_BOX,
    Agent,
    AgentSpec,
    Box,
    GameConfig,
    PolicyKind,
)
from src.game.simulation import run_episode, spawn_agents
from src.monitoring.metrics import metrics, timed_operation
from src.monitoring.structured_logging import get_structured_logger

logger = logging.getLogger(__name__)
structured = get_structured_logger(__name__)


class PursuitSuite(str, Enum):
    """Pursuer/evader policy pairings used by the capture-time experiments."""
    AREA_MIN = "area_min"
    PURE_DISTANCE = "pure_distance"

    @property
    def pursuer_policy(self) -> PolicyKind:
        if self is PursuitSuite.AREA_MIN:
            return PolicyKind.AREA_MIN
        return PolicyKind.PURE_DISTANCE

    def evader_policy(self, n_pursuers: int) -> PolicyKind:
        """Evader policy for a batch with `n_pursuers` pursuers.

        Area-min batches pit the evader's constant-area law against its
        nearest neighboring pursuer whatever the pursuer count; the
        centroid-seeking evader stays available through
        McConfig.evader_policy.
        """
        if self is PursuitSuite.PURE_DISTANCE:
            return PolicyKind.MOVE_TO_TARGET
        return PolicyKind.CONSTANT_AREA


@dataclass
class McConfig:
    """Batch of independent games sharing a roster and spawn boxes."""
    n_runs: int = 50
    n_pursuers: int = 1
    n_evaders: int = 1
    suite: PursuitSuite = PursuitSuite.AREA_MIN
    pursuer_policy: Optional[PolicyKind] = None
    evader_policy: Optional[PolicyKind] = None
    evader_target: Tuple[float, float] = DEFAULT_EVADER_TARGET
    pursuer_box: Box = PURSUER_SPAWN_BOX
    evader_box: Box = EVADER_SPAWN_BOX
    base_seed: int = 0

    def resolved_pursuer_policy(self) -> PolicyKind:
        return self.pursuer_policy or self.suite.pursuer_policy

    def resolved_evader_policy(self) -> PolicyKind:
        return self.evader_policy or self.suite.evader_policy(self.n_pursuers)

    def validate(self, game: Optional[GameConfig] = None) -> List[str]:
        issues = []
        if self.n_runs < 1:
            issues.append("montecarlo.n_runs must be >= 1")
        if self.n_pursuers < 1:
            issues.append("montecarlo.n_pursuers must be >= 1")
        if self.n_evaders < 1:
            issues.append("montecarlo.n_evaders must be >= 1")
        roster = replace(
            game or GameConfig(),
            pursuers=self.pursuer_specs(),
            evaders=self.evader_specs(),
            pursuer_box=self.pursuer_box,
            evader_box=self.evader_box,
        )
        issues.extend(
            issue.replace("game.", "montecarlo.", 1)
            for issue in roster.validate()
            if "box" in issue or "policy" in issue
        )
        return issues

    def pursuer_specs(self) -> List[AgentSpec]:
        return [AgentSpec(self.resolved_pursuer_policy()) for _ in range(self.n_pursuers)]

    def evader_specs(self) -> List[AgentSpec]:
        return [
            AgentSpec(self.resolved_evader_policy(), target=self.evader_target)
            for _ in range(self.n_evaders)
        ]


@dataclass
class CaptureStats:
    """Capture-time statistics over the captured runs of a batch."""
    mean: Optional[float]
    std: Optional[float]
    min: Optional[float]
    max: Optional[float]
    timeout_count: int
    n_runs: int
    times: List[Optional[float]] = field(default_factory=list, repr=False)

    @property
    def n_captured(self) -> int:
        return self.n_runs - self.timeout_count

    @property
    def empty(self) -> bool:
        """True when every run timed out."""
        return self.n_captured == 0

    @classmethod
    def from_times(cls, times: List[Optional[float]]) -> "CaptureStats":
        captured = np.array([t for t in times if t is not None], dtype=np.float64)
        timeouts = len(times) - len(captured)
        if len(captured) == 0:
            return cls(None, None, None, None, timeouts, len(times), list(times))
        return cls(
            mean=float(np.mean(captured)),
            std=float(np.std(captured)),
            min=float(np.min(captured)),
            max=float(np.max(captured)),
            timeout_count=timeouts,
            n_runs=len(times),
            times=list(times),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            'mean': self.mean,
            'std': self.std,
            'min': self.min,
            'max': self.max,
            'timeout_count': self.timeout_count,
            'n_runs': self.n_runs,
        }


def run_seed(base_seed: int, run_index: int) -> np.random.SeedSequence:
    """Independent, reproducible seed material for one run of a batch."""
    return np.random.SeedSequence([base_seed, run_index])


def sample_initial(cfg: McConfig, run_index: int) -> Tuple[Agent, ...]:
    """Draw the start positions for one run from the spawn boxes."""
    rng = np.random.default_rng(run_seed(cfg.base_seed, run_index))
    return spawn_agents(
        cfg.pursuer_specs(), cfg.evader_specs(), cfg.pursuer_box, cfg.evader_box, rng
    )


def _game_for(cfg: McConfig, game: GameConfig) -> GameConfig:
    return replace(
        game,
        pursuers=cfg.pursuer_specs(),
        evaders=cfg.evader_specs(),
        pursuer_box=cfg.pursuer_box,
        evader_box=cfg.evader_box,
    )


def _run_single(args: Tuple[McConfig, GameConfig, int]) -> Optional[float]:
    """Worker: last capture time of one run, None on timeout."""
    cfg, game, run_index = args
    result = run_episode(
        game,
        seed=cfg.base_seed,
        agents=sample_initial(cfg, run_index),
        record_trajectory=False,
    )
    return result.last_capture_time


@timed_operation("montecarlo.run_mc")
def run_mc(
    cfg: McConfig,
    game: Optional[GameConfig] = None,
    workers: int = 1,
    progress: bool = False,
) -> CaptureStats:
    """Run cfg.n_runs independent games and aggregate their capture times.

    Results are collected in run order, so the statistics do not depend on
    the number of workers.
    """
    game = _game_for(cfg, game or GameConfig())
    jobs = [(cfg, game, k) for k in range(cfg.n_runs)]
    label = f"{cfg.suite.value} {cfg.n_pursuers}v{cfg.n_evaders}"

    if workers > 1 and cfg.n_runs > 1:
        with ProcessPoolExecutor(max_workers=min(workers, cfg.n_runs)) as pool:
            times = list(tqdm(
                pool.map(_run_single, jobs),
                total=len(jobs), desc=label, disable=not progress,
            ))
    else:
        times = [_run_single(job) for job in tqdm(jobs, desc=label, disable=not progress)]

    stats = CaptureStats.from_times(times)
    metrics.record_values("montecarlo.capture_time", (t for t in times if t is not None))
    metrics.record_counter("montecarlo.timeout", sum(t is None for t in times))
    if stats.empty:
        logger.warning(f"{label}: all {cfg.n_runs} runs timed out")
    structured.info(
        f"Monte-Carlo batch {label} finished",
        suite=cfg.suite.value,
        n_pursuers=cfg.n_pursuers,
        n_evaders=cfg.n_evaders,
        **stats.to_dict(),
    )
    return stats
