#!/usr/bin/env python3
"""Grid-density engagement MDP: defender allocation against left-moving intruders."""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from numpy.typing import NDArray

from src.allocation.engagement import (
    ENGAGEMENT_THRESHOLD,
    EngagementOutcome,
    UnitScale,
    resolve_engagements,
)
from src.allocation.transitions import (
    ACTION_HIGH,
    ACTION_LOW,
    build_transition,
    n_actions,
)
from src.montecarlo.capture_table import SCORE_ORIENTATIONS, CaptureTimeTable
from src.montecarlo.harness import PursuitSuite

logger = logging.getLogger(__name__)

MASS_TOLERANCE = 1e-9
# Consecutive steps with intruder mass on the left edge that count as a breach
BREACH_STEPS = 2


@dataclass
class GridConfig:
    """Map size, episode length and force composition of the allocation game."""
    n: int = 3
    k_max: int = 8
    defender_units: float = 100.0
    intruder_units: float = 100.0
    intruder_mass: float = 1.0
    policy: PursuitSuite = PursuitSuite.PURE_DISTANCE
    fail_on_breach: bool = False

    @property
    def unit_scale(self) -> UnitScale:
        return UnitScale(self.defender_units, self.intruder_units)

    def validate(self) -> List[str]:
        issues = []
        if self.n < 2:
            issues.append("grid.n must be >= 2")
        if self.k_max < 1:
            issues.append("grid.k_max must be >= 1")
        if self.defender_units <= 0:
            issues.append("grid.defender_units must be > 0")
        if self.intruder_units <= 0:
            issues.append("grid.intruder_units must be > 0")
        if not 0 < self.intruder_mass <= 1:
            issues.append("grid.intruder_mass must be in (0, 1]")
        return issues


@dataclass
class RewardConfig:
    """Weights of the distribution and capture terms of the step reward."""
    c_distribution: float = 1.0
    c_capture: float = 0.0
    score_orientation: str = "fast"
    table_path: Optional[str] = None

    def validate(self) -> List[str]:
        issues = []
        if self.c_distribution < 0:
            issues.append("reward.c_distribution must be >= 0")
        if self.c_capture < 0:
            issues.append("reward.c_capture must be >= 0")
        if self.score_orientation not in SCORE_ORIENTATIONS:
            issues.append(
                f"reward.score_orientation must be one of {', '.join(SCORE_ORIENTATIONS)}"
            )
        return issues

    def load_table(self) -> CaptureTimeTable:
        """Table from table_path, or the built-in reference means when unset."""
        if self.table_path:
            return CaptureTimeTable.load(self.table_path)
        return CaptureTimeTable.reference()


@dataclass(frozen=True, eq=False)
class GridState:
    """Defender and intruder densities (row-major over the N x N grid)."""
    defender: NDArray[np.float64]
    intruder: NDArray[np.float64]
    k: int
    k_max: int
    breach_steps: int = 0

    @property
    def n(self) -> int:
        return int(round(np.sqrt(self.defender.shape[0])))

    def observation(self) -> NDArray[np.float64]:
        """[defender (N^2), intruder (N^2), k / k_max]"""
        return np.concatenate([self.defender, self.intruder, [self.k / self.k_max]])

    def to_record(self) -> Dict[str, Any]:
        return {
            'k': self.k,
            'defender': self.defender.tolist(),
            'intruder': self.intruder.tolist(),
        }


@dataclass(frozen=True, eq=False)
class StepOutcome:
    state: GridState
    reward: float
    done: bool
    engagement: EngagementOutcome
    breached: bool = False


def validate_state(state: GridState) -> None:
    size = state.defender.shape[0]
    n = state.n
    if n < 2 or n * n != size or state.intruder.shape != state.defender.shape:
        raise ValueError(f"Grid state vectors must both have N^2 entries, got {size}")
    if np.any(state.defender < 0) or np.any(state.intruder < 0):
        raise ValueError("Grid densities must be non-negative")
    if abs(float(np.sum(state.defender)) - 1.0) > MASS_TOLERANCE:
        raise ValueError("Defender density must sum to 1")
    if float(np.sum(state.intruder)) > 1.0 + MASS_TOLERANCE:
        raise ValueError("Intruder density must sum to at most 1")


def shift_left(intruder: NDArray[np.float64], n: int) -> NDArray[np.float64]:
    """Move every column one step left; mass already in column 0 stays there."""
    grid = intruder.reshape(n, n)
    shifted = np.zeros_like(grid)
    shifted[:, :-1] = grid[:, 1:]
    shifted[:, 0] += grid[:, 0]
    return shifted.ravel()


def advance(
    state: GridState,
    a: NDArray[np.float64],
    reward_cfg: RewardConfig,
    table: CaptureTimeTable,
    grid_cfg: Optional[GridConfig] = None,
) -> StepOutcome:
    """One MDP step, keeping the per-cell engagement detail."""
    validate_state(state)
    grid_cfg = grid_cfg or GridConfig(n=state.n, k_max=state.k_max)
    n = state.n
    transition = build_transition(a, n)

    defender = transition @ state.defender
    # Clear round-off so the vector stays non-negative
    defender = np.clip(defender, 0.0, None)
    shifted = shift_left(state.intruder, n)

    engagement = resolve_engagements(
        defender,
        shifted,
        grid_cfg.unit_scale,
        table,
        policy=PursuitSuite(grid_cfg.policy).value,
        orientation=reward_cfg.score_orientation,
    )
    intruder = np.clip(shifted - engagement.destroyed, 0.0, None)

    capture_term = engagement.mean_score(shifted)
    reward = (
        -reward_cfg.c_distribution * float(np.sum(intruder))
        + reward_cfg.c_capture * capture_term
    )

    at_edge = float(np.sum(intruder.reshape(n, n)[:, 0])) > ENGAGEMENT_THRESHOLD
    breach_steps = state.breach_steps + 1 if at_edge else 0
    breached = grid_cfg.fail_on_breach and breach_steps >= BREACH_STEPS

    k = state.k + 1
    done = k >= state.k_max or float(np.sum(intruder)) <= ENGAGEMENT_THRESHOLD or breached
    next_state = GridState(defender, intruder, k, state.k_max, breach_steps)
    return StepOutcome(next_state, reward, done, engagement, breached)


def env_step(
    state: GridState,
    a: NDArray[np.float64],
    reward_cfg: RewardConfig,
    table: CaptureTimeTable,
    grid_cfg: Optional[GridConfig] = None,
) -> Tuple[GridState, float, bool]:
    """Move defenders by T(a), shift intruders left, resolve engagements, score.

    reward = -c_distribution * sum(intruder') + c_capture * score, where score
    is the intruder-mass-weighted mean capture score over engaged cells.
    """
    outcome = advance(state, a, reward_cfg, table, grid_cfg)
    return outcome.state, outcome.reward, outcome.done


def initial_grid_state(grid_cfg: GridConfig, rng: np.random.Generator) -> GridState:
    """Defenders massed in the left-centre cell; intruders spread evenly over a
    random non-empty subset of the right column."""
    n = grid_cfg.n
    defender = np.zeros(n * n)
    defender[(n // 2) * n] = 1.0

    count = int(rng.integers(1, n + 1))
    rows = np.sort(rng.choice(n, size=count, replace=False))
    intruder = np.zeros(n * n)
    intruder[rows * n + (n - 1)] = grid_cfg.intruder_mass / count
    return GridState(defender, intruder, 0, grid_cfg.k_max)


@dataclass
class AllocationEnv:
    """Step-then-observe wrapper around the allocation MDP.

    Observations are GridState.observation() vectors; actions are raw
    transition weights in [0, 1]. Every reset and step is appended to
    `rollout` as {k, defender, intruder, reward, done}.
    """
    grid: GridConfig = field(default_factory=GridConfig)
    reward: RewardConfig = field(default_factory=RewardConfig)
    table: Optional[CaptureTimeTable] = None
    rollout: List[Dict[str, Any]] = field(default_factory=list, init=False)
    _state: Optional[GridState] = field(default=None, init=False, repr=False)
    _done: bool = field(default=True, init=False, repr=False)

    def __post_init__(self):
        if self.table is None:
            self.table = self.reward.load_table()

    @property
    def observation_size(self) -> int:
        return 2 * self.grid.n * self.grid.n + 1

    @property
    def action_size(self) -> int:
        return n_actions(self.grid.n)

    @property
    def action_low(self) -> float:
        return ACTION_LOW

    @property
    def action_high(self) -> float:
        return ACTION_HIGH

    @property
    def state(self) -> GridState:
        if self._state is None:
            raise RuntimeError("Environment has not been reset")
        return self._state

    def reset(self, seed: Optional[int] = None) -> NDArray[np.float64]:
        self._state = initial_grid_state(self.grid, np.random.default_rng(seed))
        self._done = False
        self.rollout = [{**self._state.to_record(), 'reward': 0.0, 'done': False}]
        return self._state.observation()

    def step(
        self, action: NDArray[np.float64]
    ) -> Tuple[NDArray[np.float64], float, bool, Dict[str, Any]]:
        if self._done:
            raise RuntimeError("Episode finished; call reset() before stepping")
        outcome = advance(self.state, action, self.reward, self.table, self.grid)
        self._state = outcome.state
        self._done = outcome.done
        self.rollout.append({
            **outcome.state.to_record(), 'reward': outcome.reward, 'done': outcome.done,
        })
        info = {
            'engaged_cells': int(np.count_nonzero(outcome.engagement.engaged)),
            'destroyed': float(np.sum(outcome.engagement.destroyed)),
            'concentration': concentration(outcome),
            'breached': outcome.breached,
        }
        if outcome.breached:
            logger.debug(f"Intruders breached the left edge at k={outcome.state.k}")
        return outcome.state.observation(), outcome.reward, outcome.done, info


def concentration(outcome: StepOutcome) -> float:
    """Largest defender mass among engaged cells, 0 when nothing engaged."""
    engaged = outcome.engagement.engaged
    if not np.any(engaged):
        return 0.0
    return float(np.max(outcome.state.defender[engaged]))

