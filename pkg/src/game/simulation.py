#!/usr/bin/env python3
"""Fixed-step pursuit-evasion simulation: capture detection, stepping, episodes."""

import logging
from typing import Dict, List, Optional, Set, Tuple

import numpy as np

from src.game.agents import (
    DEFAULT_EVADER_TARGET,
    Agent,
    AgentSpec,
    Box,
    EpisodeResult,
    GameConfig,
    GameState,
    PolicyKind,
    Role,
    TrajectoryRow,
)
from src.game.controls import (
    ZERO,
    ControlError,
    ZeroDirectionError,
    area_min_control,
    constant_area_control,
    move_to_centroid_control,
    move_to_target_control,
    nearest_index,
    pure_distance_control,
)
from src.geometry.polygon import GEOMETRY_TOLERANCE, Point2, project_onto
from src.geometry.voronoi import VoronoiDiagram, clipped_voronoi
from src.monitoring.metrics import timed_operation

logger = logging.getLogger(__name__)

# Minimum spacing between sampled start positions
SPAWN_SEPARATION = 1e-6
MAX_SPAWN_ATTEMPTS = 1000


class EpisodeOverError(RuntimeError):
    """One side has no alive agents left."""


def _sample_in_box(box: Box, rng: np.random.Generator) -> Point2:
    xmin, ymin, xmax, ymax = box
    return np.array([rng.uniform(xmin, xmax), rng.uniform(ymin, ymax)], dtype=np.float64)


def spawn_agents(
    pursuers: List[AgentSpec],
    evaders: List[AgentSpec],
    pursuer_box: Box,
    evader_box: Box,
    rng: np.random.Generator,
) -> Tuple[Agent, ...]:
    """Create agents, drawing missing start positions uniformly from the boxes.

    Pursuers get ids 0..n_p-1, evaders n_p..n_p+n_e-1. Draws closer than
    1e-6 to an already placed agent are rejected and redrawn.
    """
    placed: List[Point2] = []
    agents: List[Agent] = []

    def place(spec: AgentSpec, box: Box) -> Point2:
        if spec.position is not None:
            position = np.array(spec.position, dtype=np.float64)
            placed.append(position)
            return position
        for _ in range(MAX_SPAWN_ATTEMPTS):
            candidate = _sample_in_box(box, rng)
            if all(np.linalg.norm(candidate - p) >= SPAWN_SEPARATION for p in placed):
                placed.append(candidate)
                return candidate
        raise RuntimeError(f"Could not place an agent in box {box}")

    for spec in pursuers:
        agents.append(Agent(len(agents), Role.PURSUER, place(spec, pursuer_box), spec.policy))
    for spec in evaders:
        position = place(spec, evader_box)
        target = None
        if spec.policy is PolicyKind.MOVE_TO_TARGET:
            target = np.array(
                spec.target if spec.target is not None else DEFAULT_EVADER_TARGET,
                dtype=np.float64,
            )
        agents.append(Agent(len(agents), Role.EVADER, position, spec.policy, target=target))
    return tuple(agents)


def initial_state(agents: Tuple[Agent, ...]) -> GameState:
    return GameState(agents=tuple(agents), step_count=0, t=0.0)


def capture_check(state: GameState, capture_radius: float) -> Set[int]:
    """Ids of alive evaders strictly within capture_radius of an alive pursuer."""
    pursuers = state.alive(Role.PURSUER)
    if not pursuers:
        return set()
    pursuer_positions = np.asarray([p.position for p in pursuers])
    captured = set()
    for evader in state.alive(Role.EVADER):
        gap = np.min(np.linalg.norm(pursuer_positions - evader.position, axis=1))
        if gap < capture_radius:
            captured.add(evader.id)
    return captured


def _build_diagram(
    agents: List[Agent],
    config: GameConfig,
) -> Tuple[VoronoiDiagram, Dict[int, int]]:
    """Voronoi diagram over alive agents plus an agent-id -> site-index map.

    An agent coinciding with an earlier site is left out for this step; it
    has no cell and its controller falls back accordingly.
    """
    sites: List[Point2] = []
    index: Dict[int, int] = {}
    for agent in agents:
        if any(np.linalg.norm(agent.position - s) <= GEOMETRY_TOLERANCE for s in sites):
            logger.debug(f"Agent {agent.id} coincides with another site; skipped this step")
            continue
        index[agent.id] = len(sites)
        sites.append(agent.position)
    return clipped_voronoi(sites, config.domain), index


def _pursuer_heading(
    agent: Agent,
    evaders: List[Agent],
    diagram: Optional[VoronoiDiagram],
    index: Dict[int, int],
) -> Point2:
    evader_positions = [e.position for e in evaders]
    if agent.policy is PolicyKind.AREA_MIN and diagram is not None:
        engaged = evaders[nearest_index(agent.position, evader_positions)]
        p_idx, e_idx = index.get(agent.id), index.get(engaged.id)
        if p_idx is not None and e_idx is not None and diagram.are_neighbors(e_idx, p_idx):
            try:
                return area_min_control(p_idx, diagram, e_idx)
            except ZeroDirectionError:
                return ZERO
    try:
        return pure_distance_control(agent.position, evader_positions)
    except ZeroDirectionError:
        return ZERO


def _evader_heading(
    agent: Agent,
    pursuers: List[Agent],
    diagram: Optional[VoronoiDiagram],
    index: Dict[int, int],
) -> Point2:
    if agent.policy is PolicyKind.MOVE_TO_TARGET:
        target = agent.target if agent.target is not None else agent.position
        return move_to_target_control(agent.position, target)

    e_idx = index.get(agent.id)
    if diagram is None or e_idx is None:
        return ZERO

    if agent.policy is PolicyKind.CONSTANT_AREA:
        neighbors = [
            p for p in pursuers
            if p.id in index and diagram.are_neighbors(e_idx, index[p.id])
        ]
        if neighbors:
            nearest = neighbors[nearest_index(agent.position, [p.position for p in neighbors])]
            try:
                return constant_area_control(e_idx, diagram, index[nearest.id])
            except ZeroDirectionError:
                return ZERO
    return move_to_centroid_control(e_idx, diagram)


def step(
    state: GameState,
    config: GameConfig,
    built: Optional[Tuple[VoronoiDiagram, Dict[int, int]]] = None,
) -> GameState:
    """Advance the game by one forward-Euler step of length config.dt.

    `built` is a diagram already computed for the current positions by
    _build_diagram; pursuers and evaders both read their cells from it.

    Raises:
        EpisodeOverError: no alive pursuers or no alive evaders.
    """
    pursuers = state.alive(Role.PURSUER)
    evaders = state.alive(Role.EVADER)
    if not pursuers or not evaders:
        raise EpisodeOverError("Both roles need at least one alive agent to step")

    alive = [a for a in state.agents if a.alive]
    diagram, index = built if built is not None else (None, {})
    if diagram is None and any(a.policy.needs_voronoi for a in alive):
        diagram, index = _build_diagram(alive, config)

    reach = config.v_max * config.dt
    moved = []
    for agent in state.agents:
        if not agent.alive:
            moved.append(agent)
            continue
        try:
            if agent.role is Role.PURSUER:
                heading = _pursuer_heading(agent, evaders, diagram, index)
            else:
                heading = _evader_heading(agent, pursuers, diagram, index)
        except ControlError as error:
            logger.debug(f"Agent {agent.id} holds position: {error}")
            heading = ZERO
        position = project_onto(config.domain, agent.position + reach * heading)
        moved.append(agent.moved_to(position))

    step_count = state.step_count + 1
    advanced = GameState(
        agents=tuple(moved),
        step_count=step_count,
        t=step_count * config.dt,
        diagram=diagram,
    )
    captured = capture_check(advanced, config.capture_radius)
    if not captured:
        return advanced
    return GameState(
        agents=tuple(a.captured() if a.id in captured else a for a in advanced.agents),
        step_count=step_count,
        t=advanced.t,
        diagram=diagram,
    )


def _log_rows(state: GameState) -> List[TrajectoryRow]:
    return [
        TrajectoryRow(
            t=state.t,
            agent_id=a.id,
            role=a.role.value,
            x=float(a.position[0]),
            y=float(a.position[1]),
            alive=a.alive,
        )
        for a in state.agents
    ]


def evader_cell_areas(
    state: GameState,
    config: GameConfig,
    built: Optional[Tuple[VoronoiDiagram, Dict[int, int]]] = None,
) -> Dict[int, float]:
    """Safe reachable area of every alive evader at the current positions."""
    alive = [a for a in state.agents if a.alive]
    diagram, index = built if built is not None else _build_diagram(alive, config)
    return {
        a.id: diagram.cell_area(index[a.id])
        for a in alive
        if a.role is Role.EVADER and a.id in index
    }


@timed_operation("game.run_episode")
def run_episode(
    config: GameConfig,
    seed: int,
    agents: Optional[Tuple[Agent, ...]] = None,
    record_trajectory: bool = True,
    record_areas: bool = False,
) -> EpisodeResult:
    """Play one game until every evader is captured or t_max is reached.

    Start positions not fixed by the config (or by `agents`) are drawn from
    the spawn boxes with a generator seeded by `seed`.
    """
    if agents is None:
        rng = np.random.default_rng(seed)
        agents = spawn_agents(
            config.pursuers, config.evaders, config.pursuer_box, config.evader_box, rng
        )
    state = initial_state(agents)

    capture_times: Dict[int, Optional[float]] = {
        a.id: None for a in state.agents if a.role is Role.EVADER
    }
    for evader_id in capture_check(state, config.capture_radius):
        capture_times[evader_id] = 0.0
    state = GameState(
        agents=tuple(a.captured() if capture_times.get(a.id) == 0.0 else a for a in state.agents),
    )

    trajectories: List[TrajectoryRow] = _log_rows(state) if record_trajectory else []
    areas: Dict[int, List[float]] = {eid: [] for eid in capture_times}
    max_steps = int(round(config.t_max / config.dt))

    while state.alive(Role.EVADER) and state.alive(Role.PURSUER) and state.step_count < max_steps:
        built = None
        if record_areas:
            built = _build_diagram([a for a in state.agents if a.alive], config)
            for evader_id, area in evader_cell_areas(state, config, built).items():
                areas[evader_id].append(area)
        was_alive = {a.id for a in state.alive(Role.EVADER)}
        state = step(state, config, built)
        for evader_id in was_alive - {a.id for a in state.alive(Role.EVADER)}:
            capture_times[evader_id] = state.t
        if record_trajectory:
            trajectories.extend(_log_rows(state))

    terminated_by = "capture" if all(t is not None for t in capture_times.values()) else "timeout"
    logger.debug(
        f"Episode seed={seed} ended by {terminated_by} at t={state.t:.2f} "
        f"after {state.step_count} steps"
    )
    return EpisodeResult(
        capture_times=capture_times,
        trajectories=trajectories,
        terminated_by=terminated_by,
        evader_areas=areas if record_areas else {},
        final_state=state,
    )
