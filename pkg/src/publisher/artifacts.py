#!/usr/bin/env python3
"""CSV, JSON and JSON-lines artifact writers with fixed float precision."""

import csv
import json
import logging
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from src.game.agents import TrajectoryRow

logger = logging.getLogger(__name__)

FLOAT_FORMAT = ".9g"

TRAJECTORY_HEADER = ("t", "agent_id", "role", "x", "y", "alive")
CAPTURE_TIMES_HEADER = ("case", "run", "capture_time", "captured")
TRAINING_LOG_HEADER = ("episode", "steps", "return", "critic_loss_mean")


def fmt(value: Any) -> str:
    """Render one CSV cell; floats get 9 significant digits."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, (float, np.floating)):
        return format(float(value), FLOAT_FORMAT)
    return str(value)


def rounded(obj: Any) -> Any:
    """Recursively round floats to 9 significant digits for JSON output."""
    if isinstance(obj, dict):
        return {str(k): rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [rounded(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if not np.isfinite(value):
            return None
        return float(format(value, FLOAT_FORMAT))
    return obj


def _prepare(path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def write_csv(header: Sequence[str], rows: Iterable[Sequence[Any]], path: Path | str) -> Path:
    path = _prepare(path)
    with open(path, 'w', encoding='utf-8', newline='') as file:
        writer = csv.writer(file, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    logger.info(f"Wrote {path}")
    return path


def write_json(document: Any, path: Path | str) -> Path:
    path = _prepare(path)
    with open(path, 'w', encoding='utf-8') as file:
        json.dump(rounded(document), file, indent=2, sort_keys=False)
        file.write('\n')
    logger.info(f"Wrote {path}")
    return path


def write_jsonl(records: Iterable[Dict[str, Any]], path: Path | str) -> Path:
    path = _prepare(path)
    with open(path, 'w', encoding='utf-8') as file:
        for record in records:
            file.write(json.dumps(rounded(record)))
            file.write('\n')
    logger.info(f"Wrote {path}")
    return path


def write_trajectory_csv(rows: Iterable[TrajectoryRow], path: Path | str) -> Path:
    return write_csv(
        TRAJECTORY_HEADER,
        ((r.t, r.agent_id, r.role, r.x, r.y, r.alive) for r in rows),
        path,
    )


def write_capture_times_csv(
    cases: Sequence[Tuple[str, Sequence[Optional[float]]]], path: Path | str
) -> Path:
    """One row per run of every case; timed-out runs have an empty capture_time."""
    return write_csv(
        CAPTURE_TIMES_HEADER,
        ((case, k, t, t is not None) for case, times in cases for k, t in enumerate(times)),
        path,
    )


class TrainingLogWriter:
    """Streams per-episode training rows to CSV, flushing after each row."""

    def __init__(self, path: Optional[Path | str]):
        self.path = Path(path) if path else None
        self._file = None
        self._writer = None
        self.rows: List[Sequence[Any]] = []

    def __enter__(self) -> "TrainingLogWriter":
        if self.path is not None:
            self._file = open(_prepare(self.path), 'w', encoding='utf-8', newline='')
            self._writer = csv.writer(self._file, lineterminator='\n')
            self._writer.writerow(TRAINING_LOG_HEADER)
            self._file.flush()
        return self

    def write(self, episode: int, steps: int, episode_return: float, critic_loss_mean: Optional[float]) -> None:
        row = (episode, steps, float(episode_return), critic_loss_mean)
        self.rows.append(row)
        if self._writer is not None:
            self._writer.writerow([fmt(v) for v in row])
            self._file.flush()

    def __exit__(self, exc_type, exc, tb) -> None:
        if self._file is not None:
            self._file.close()
            logger.info(f"Wrote {self.path}")
