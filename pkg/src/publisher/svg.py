#!/usr/bin/env python3
"""SVG renderings of game snapshots and allocation rollouts."""

import logging
import os
from collections import OrderedDict
from pathlib import Path
from typing import Any, Dict, List, Sequence

import numpy as np
from jinja2 import Template

from src.game.agents import EpisodeResult, GameConfig, Role, TrajectoryRow
from src.geometry.polygon import GeometryError
from src.geometry.voronoi import clipped_voronoi
from src.publisher.artifacts import FLOAT_FORMAT

logger = logging.getLogger(__name__)

CANVAS_SIZE = 400
CANVAS_MARGIN = 10
AGENT_RADIUS_PX = 4
ROLE_COLORS = {Role.PURSUER.value: "#1f77b4", Role.EVADER.value: "#d62728"}

DENSITY_CELL_PX = 30
DENSITY_PANEL_GAP = 12


def _num(value: float) -> str:
    return format(float(value), FLOAT_FORMAT)


def _load_template(name: str) -> Template:
    base_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    template_path = os.path.join(base_dir, "templates", name)
    with open(template_path, encoding='utf-8') as f:
        return Template(f.read())


class _Canvas:
    """Maps arena coordinates onto the pixel grid, y pointing up."""

    def __init__(self, bounds: Sequence[float], size: int = CANVAS_SIZE, margin: int = CANVAS_MARGIN):
        self.xmin, self.ymin, self.xmax, self.ymax = bounds
        self.size = size
        self.margin = margin
        self.scale = (size - 2 * margin) / max(self.xmax - self.xmin, self.ymax - self.ymin)

    def x(self, value: float) -> str:
        return _num(self.margin + (value - self.xmin) * self.scale)

    def y(self, value: float) -> str:
        return _num(self.size - self.margin - (value - self.ymin) * self.scale)

    def points(self, vertices) -> str:
        return " ".join(f"{self.x(vx)},{self.y(vy)}" for vx, vy in vertices)


def _frames(rows: Sequence[TrajectoryRow]) -> "OrderedDict[float, List[TrajectoryRow]]":
    frames: "OrderedDict[float, List[TrajectoryRow]]" = OrderedDict()
    for row in rows:
        frames.setdefault(row.t, []).append(row)
    return frames


def snapshot_indices(n_frames: int) -> List[int]:
    """Start, middle and final frame."""
    if n_frames <= 0:
        return []
    return [0, (n_frames - 1) // 2, n_frames - 1]


def render_snapshot(
    rows: Sequence[TrajectoryRow],
    config: GameConfig,
    frame: int,
    title: str = "",
) -> str:
    """Trajectories up to `frame`, agent positions and Voronoi cells at `frame`."""
    frames = _frames(rows)
    times = list(frames)
    canvas = _Canvas(config.domain.bounds())
    t = times[frame]
    current = frames[t]

    alive = [r for r in current if r.alive]
    cells = []
    if alive:
        try:
            diagram = clipped_voronoi(np.array([[r.x, r.y] for r in alive]), config.domain)
            cells = [
                {'points': canvas.points(cell.vertices), 'fill': ROLE_COLORS[r.role]}
                for r, cell in zip(alive, diagram.cells)
            ]
        except GeometryError as e:
            logger.debug(f"No Voronoi cells at t={t}: {e}")

    history: Dict[int, List[TrajectoryRow]] = {}
    for past in times[: frame + 1]:
        for row in frames[past]:
            history.setdefault(row.agent_id, []).append(row)
    paths = [
        {
            'points': canvas.points((r.x, r.y) for r in agent_rows),
            'color': ROLE_COLORS[agent_rows[0].role],
        }
        for _, agent_rows in sorted(history.items())
    ]
    agents = [
        {
            'x': canvas.x(r.x), 'y': canvas.y(r.y), 'r': AGENT_RADIUS_PX,
            'color': ROLE_COLORS[r.role], 'alive': r.alive,
        }
        for r in current
    ]
    return _load_template("snapshot.svg").render(
        width=canvas.size,
        height=canvas.size,
        title=title,
        domain=canvas.points(config.domain.vertices),
        cells=cells,
        paths=paths,
        agents=agents,
        t=_num(t),
    )


def write_snapshots(result: EpisodeResult, config: GameConfig, out_dir: Path | str) -> List[Path]:
    """snapshot_0.svg (start), snapshot_1.svg (mid), snapshot_2.svg (end)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    n_frames = len(_frames(result.trajectories))
    paths = []
    for k, frame in enumerate(snapshot_indices(n_frames)):
        path = out_dir / f"snapshot_{k}.svg"
        path.write_text(
            render_snapshot(result.trajectories, config, frame, title=f"snapshot {k}"),
            encoding='utf-8',
        )
        paths.append(path)
    logger.info(f"Wrote {len(paths)} snapshots to {out_dir}")
    return paths


def render_density_strip(rollout: Sequence[Dict[str, Any]], title: str = "") -> str:
    """One N x N panel per rollout step: defender mass as cell opacity,
    intruder mass as circle area."""
    if not rollout:
        raise ValueError("Cannot render an empty rollout")
    n = int(round(np.sqrt(len(rollout[0]['defender']))))
    panel_size = n * DENSITY_CELL_PX
    panels = []
    for index, record in enumerate(rollout):
        defender = np.asarray(record['defender'], dtype=np.float64).reshape(n, n)
        intruder = np.asarray(record['intruder'], dtype=np.float64).reshape(n, n)
        cells = []
        for row in range(n):
            for col in range(n):
                x, y = col * DENSITY_CELL_PX, row * DENSITY_CELL_PX
                mass = float(intruder[row, col])
                cells.append({
                    'x': x,
                    'y': y,
                    'cx': _num(x + DENSITY_CELL_PX / 2),
                    'cy': _num(y + DENSITY_CELL_PX / 2),
                    'defender': _num(min(1.0, max(0.0, defender[row, col]))),
                    'intruder_r': _num(0.45 * DENSITY_CELL_PX * np.sqrt(mass)) if mass > 1e-6 else None,
                })
        panels.append({
            'x': DENSITY_PANEL_GAP + index * (panel_size + DENSITY_PANEL_GAP),
            'k': record.get('k', index),
            'cells': cells,
        })
    width = DENSITY_PANEL_GAP + len(rollout) * (panel_size + DENSITY_PANEL_GAP)
    return _load_template("density_strip.svg").render(
        width=width,
        height=panel_size + 2 * DENSITY_PANEL_GAP + 16,
        title=title,
        margin=DENSITY_PANEL_GAP,
        panel_size=panel_size,
        cell_size=DENSITY_CELL_PX,
        panels=panels,
    )


def write_density_strip(rollout: Sequence[Dict[str, Any]], path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_density_strip(rollout, title=path.stem), encoding='utf-8')
    logger.info(f"Wrote {path}")
    return path
