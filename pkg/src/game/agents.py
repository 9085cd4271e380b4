#!/usr/bin/env python3
"""Agents, game configuration and episode records for pursuit-evasion games."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.spatial.distance import pdist

from src.geometry.polygon import GEOMETRY_TOLERANCE, ConvexPolygon, Point2, contains
from src.geometry.voronoi import VoronoiDiagram

# Arena and integration defaults
ARENA_SIZE = 10.0
DEFAULT_SPEED = 1.0
DEFAULT_CAPTURE_RADIUS = 0.25
DEFAULT_TIMESTEP = 0.01
DEFAULT_EPISODE_CAP = 200.0

# Spawn boxes as (xmin, ymin, xmax, ymax)
PURSUER_SPAWN_BOX = (3.0, 0.0, 5.0, 10.0)
EVADER_SPAWN_BOX = (7.0, 0.0, 9.0, 10.0)
DEFAULT_EVADER_TARGET = (0.0, 5.0)

Box = Tuple[float, float, float, float]


class Role(str, Enum):
    PURSUER = "pursuer"
    EVADER = "evader"


class PolicyKind(str, Enum):
    """Control law an agent follows."""
    AREA_MIN = "area_min"
    PURE_DISTANCE = "pure_distance"
    CONSTANT_AREA = "constant_area"
    MOVE_TO_CENTROID = "move_to_centroid"
    MOVE_TO_TARGET = "move_to_target"

    @property
    def role(self) -> Role:
        if self in (PolicyKind.AREA_MIN, PolicyKind.PURE_DISTANCE):
            return Role.PURSUER
        return Role.EVADER

    @property
    def needs_voronoi(self) -> bool:
        return self in (
            PolicyKind.AREA_MIN,
            PolicyKind.CONSTANT_AREA,
            PolicyKind.MOVE_TO_CENTROID,
        )


@dataclass(frozen=True, eq=False)
class Agent:
    """A pursuer or evader at one instant."""
    id: int
    role: Role
    position: Point2
    policy: PolicyKind
    alive: bool = True
    target: Optional[Point2] = None

    def __post_init__(self):
        if self.policy.role is not self.role:
            raise ValueError(
                f"Policy {self.policy.value} cannot drive a {self.role.value}"
            )

    def moved_to(self, position: Point2) -> "Agent":
        return Agent(self.id, self.role, position, self.policy, self.alive, self.target)

    def captured(self) -> "Agent":
        return Agent(self.id, self.role, self.position, self.policy, False, self.target)


@dataclass
class AgentSpec:
    """Configured agent: policy plus optional fixed start and target."""
    policy: PolicyKind
    position: Optional[Tuple[float, float]] = None
    target: Optional[Tuple[float, float]] = None


@dataclass
class GameConfig:
    """Arena, dynamics constants and agent roster for one game."""
    domain: ConvexPolygon = field(
        default_factory=lambda: ConvexPolygon.box(0.0, 0.0, ARENA_SIZE, ARENA_SIZE)
    )
    v_max: float = DEFAULT_SPEED
    capture_radius: float = DEFAULT_CAPTURE_RADIUS
    dt: float = DEFAULT_TIMESTEP
    t_max: float = DEFAULT_EPISODE_CAP
    pursuers: List[AgentSpec] = field(
        default_factory=lambda: [AgentSpec(PolicyKind.AREA_MIN)]
    )
    evaders: List[AgentSpec] = field(
        default_factory=lambda: [AgentSpec(PolicyKind.CONSTANT_AREA)]
    )
    pursuer_box: Box = PURSUER_SPAWN_BOX
    evader_box: Box = EVADER_SPAWN_BOX

    def validate(self) -> List[str]:
        """Return a list of configuration issues (empty when valid)."""
        issues = []
        if not self.capture_radius > 0:
            issues.append("game.capture_radius must be > 0")
        if not self.dt > 0:
            issues.append("game.dt must be > 0")
        if not self.v_max > 0:
            issues.append("game.v_max must be > 0")
        if not self.t_max > 0:
            issues.append("game.t_max must be > 0")
        if not self.pursuers:
            issues.append("game.pursuers must name at least one pursuer")
        if not self.evaders:
            issues.append("game.evaders must name at least one evader")
        for k, spec in enumerate(self.pursuers):
            if spec.policy.role is not Role.PURSUER:
                issues.append(f"game.pursuers[{k}].policy {spec.policy.value} is an evader policy")
        for k, spec in enumerate(self.evaders):
            if spec.policy.role is not Role.EVADER:
                issues.append(f"game.evaders[{k}].policy {spec.policy.value} is a pursuer policy")
        for name, box in (("pursuer_box", self.pursuer_box), ("evader_box", self.evader_box)):
            xmin, ymin, xmax, ymax = box
            if xmin > xmax or ymin > ymax:
                issues.append(f"game.{name} has inverted bounds")
            corners = [(xmin, ymin), (xmax, ymin), (xmax, ymax), (xmin, ymax)]
            if not all(contains(self.domain, np.array(c, dtype=np.float64)) for c in corners):
                issues.append(f"game.{name} must lie inside the domain")
        issues.extend(self._position_issues())
        return issues

    def _position_issues(self) -> List[str]:
        fixed: List[Point2] = []
        issues = []
        for role, specs in (("pursuers", self.pursuers), ("evaders", self.evaders)):
            for k, spec in enumerate(specs):
                if spec.position is None:
                    continue
                position = np.asarray(spec.position, dtype=np.float64)
                if not (np.all(np.isfinite(position)) and contains(self.domain, position)):
                    issues.append(f"game.{role}[{k}].position must lie inside the domain")
                fixed.append(position)
        if len(fixed) > 1 and np.min(pdist(np.asarray(fixed))) <= GEOMETRY_TOLERANCE:
            issues.append("game.positions must be distinct")
        return issues


@dataclass(frozen=True, eq=False)
class GameState:
    """All agents plus the simulation clock.

    diagram covers the alive agents in list order and is rebuilt every step;
    it is None when no alive agent follows a Voronoi-based policy.
    """
    agents: Tuple[Agent, ...]
    step_count: int = 0
    t: float = 0.0
    diagram: Optional[VoronoiDiagram] = None

    def alive(self, role: Role) -> List[Agent]:
        return [a for a in self.agents if a.alive and a.role is role]

    def by_id(self, agent_id: int) -> Agent:
        for agent in self.agents:
            if agent.id == agent_id:
                return agent
        raise KeyError(f"No agent with id {agent_id}")


@dataclass(frozen=True)
class TrajectoryRow:
    """One agent at one logged instant."""
    t: float
    agent_id: int
    role: str
    x: float
    y: float
    alive: bool


@dataclass
class EpisodeResult:
    """Outcome of one game."""
    capture_times: Dict[int, Optional[float]]
    trajectories: List[TrajectoryRow]
    terminated_by: str  # capture | timeout
    evader_areas: Dict[int, List[float]] = field(default_factory=dict)
    final_state: Optional[GameState] = None

    @property
    def last_capture_time(self) -> Optional[float]:
        """Time of the final capture, None when any evader escaped."""
        times = list(self.capture_times.values())
        if not times or any(t is None for t in times):
            return None
        return max(times)
