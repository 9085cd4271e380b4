#!/usr/bin/env python3
"""Pursuit and evasion control laws.

Every law returns a unit heading (or the zero vector where standing still is
the legitimate answer). Indices refer to sites of the VoronoiDiagram passed in.
"""

from typing import Sequence

import numpy as np

from src.geometry.polygon import GEOMETRY_TOLERANCE, Point2, polygon_centroid
from src.geometry.voronoi import VoronoiDiagram, shared_edge

ZERO = np.zeros(2, dtype=np.float64)


class ControlError(ValueError):
    """Base class for control-law failures."""


class ZeroDirectionError(ControlError):
    """The agent already sits on the point it should steer toward."""


class NonNeighborError(ControlError):
    """The two agents do not share a Voronoi boundary."""


class SingularityError(ControlError):
    """Pursuer and evader coincide."""


def _unit(vector: Point2, what: str) -> Point2:
    norm = float(np.linalg.norm(vector))
    if norm <= GEOMETRY_TOLERANCE:
        raise ZeroDirectionError(f"No heading toward {what}: already there")
    return vector / norm


def nearest_index(origin: Point2, candidates: Sequence[Point2]) -> int:
    """Index of the candidate closest to origin; lowest index wins ties."""
    if len(candidates) == 0:
        raise ValueError("nearest_index needs at least one candidate")
    distances = np.linalg.norm(np.asarray(candidates, dtype=np.float64) - origin, axis=1)
    return int(np.argmin(distances))


def pure_distance_control(pursuer: Point2, evaders: Sequence[Point2]) -> Point2:
    """Head straight for the nearest evader."""
    target = np.asarray(evaders[nearest_index(pursuer, evaders)], dtype=np.float64)
    return _unit(target - pursuer, "the nearest evader")


def area_gradient(pursuer_idx: int, diagram: VoronoiDiagram, evader_idx: int) -> Point2:
    """Gradient of the evader's cell area with respect to the pursuer position.

    L/|x_p - x_e| * (x_p - C_b), with L the length of the shared boundary and
    C_b its midpoint.
    """
    edge = shared_edge(diagram, evader_idx, pursuer_idx)
    if edge is None:
        raise NonNeighborError(
            f"Pursuer site {pursuer_idx} is not a Voronoi neighbor of evader site {evader_idx}"
        )
    x_p = diagram.sites[pursuer_idx]
    x_e = diagram.sites[evader_idx]
    separation = float(np.linalg.norm(x_p - x_e))
    if separation <= GEOMETRY_TOLERANCE:
        raise SingularityError("Pursuer and evader coincide")
    return edge.length / separation * (x_p - edge.centroid)


def area_min_control(pursuer_idx: int, diagram: VoronoiDiagram, evader_idx: int) -> Point2:
    """Steer the pursuer toward the midpoint of the boundary it shares with the evader."""
    edge = shared_edge(diagram, evader_idx, pursuer_idx)
    if edge is None:
        raise NonNeighborError(
            f"Pursuer site {pursuer_idx} is not a Voronoi neighbor of evader site {evader_idx}"
        )
    return _unit(edge.centroid - diagram.sites[pursuer_idx], "the shared boundary midpoint")


def constant_area_control(
    evader_idx: int,
    diagram: VoronoiDiagram,
    nearest_pursuer_idx: int,
) -> Point2:
    """Steer the evader toward the midpoint of its boundary with the given pursuer."""
    edge = shared_edge(diagram, evader_idx, nearest_pursuer_idx)
    if edge is None:
        raise NonNeighborError(
            f"Pursuer site {nearest_pursuer_idx} is not a Voronoi neighbor of evader site {evader_idx}"
        )
    return _unit(edge.centroid - diagram.sites[evader_idx], "the shared boundary midpoint")


def move_to_centroid_control(evader_idx: int, diagram: VoronoiDiagram) -> Point2:
    """Steer the evader toward the centroid of its own cell."""
    centroid = polygon_centroid(diagram.cells[evader_idx])
    offset = centroid - diagram.sites[evader_idx]
    norm = float(np.linalg.norm(offset))
    if norm <= GEOMETRY_TOLERANCE:
        return ZERO.copy()
    return offset / norm


def move_to_target_control(position: Point2, target: Point2) -> Point2:
    """Steer toward a fixed point; zero once it is reached."""
    offset = np.asarray(target, dtype=np.float64) - position
    norm = float(np.linalg.norm(offset))
    if norm <= GEOMETRY_TOLERANCE:
        return ZERO.copy()
    return offset / norm
