#!/usr/bin/env python3
"""Voronoi tessellation clipped to a bounded convex domain."""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray
from scipy.spatial.distance import pdist, squareform

from src.geometry.polygon import (
    GEOMETRY_TOLERANCE,
    CoincidentSitesError,
    ConvexPolygon,
    DomainError,
    Point2,
    Segment,
    as_points,
    clip_halfplane,
    contains,
    polygon_area,
)

logger = logging.getLogger(__name__)

EdgeKey = Tuple[int, int]


@dataclass(frozen=True, eq=False)
class VoronoiDiagram:
    """Cells, adjacency and shared boundaries of a clipped Voronoi diagram.

    cells[i] is owned by sites[i]. shared_edges is keyed by (i, j) with
    i < j; the segment is oriented as it appears on cell i.
    """
    sites: NDArray[np.float64]
    domain: ConvexPolygon
    cells: List[ConvexPolygon]
    neighbors: List[List[int]]
    shared_edges: Dict[EdgeKey, Segment] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.cells)

    def cell_area(self, i: int) -> float:
        return polygon_area(self.cells[i])

    def are_neighbors(self, i: int, j: int) -> bool:
        return j in self.neighbors[i]


def _validate_sites(sites: NDArray[np.float64], domain: ConvexPolygon) -> None:
    if len(sites) == 0:
        raise DomainError("Voronoi tessellation needs at least one site")
    for k, site in enumerate(sites):
        if not contains(domain, site):
            raise DomainError(
                f"Site {k} at ({site[0]:.6g}, {site[1]:.6g}) lies outside the domain"
            )
    if len(sites) < 2:
        return
    close = np.flatnonzero(pdist(sites) <= GEOMETRY_TOLERANCE)
    if len(close):
        rows, cols = np.triu_indices(len(sites), k=1)
        raise CoincidentSitesError(f"Sites {rows[close[0]]} and {cols[close[0]]} coincide")


def _bisectors(sites: NDArray[np.float64]) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Half-plane of points closer to site i than site j: normals[i, j] . q <= offsets[i, j]."""
    normals = sites[np.newaxis, :, :] - sites[:, np.newaxis, :]
    squared = np.einsum("ij,ij->i", sites, sites)
    offsets = 0.5 * (squared[np.newaxis, :] - squared[:, np.newaxis])
    return normals, offsets


def _edge_on_line(
    cell: ConvexPolygon,
    normal: Point2,
    offset: float,
) -> Optional[Segment]:
    """Boundary segment of a convex cell lying on the line normal . q = offset."""
    scale = float(np.linalg.norm(normal))
    distance = np.abs(cell.vertices @ normal - offset) / scale
    on_line = cell.vertices[distance <= GEOMETRY_TOLERANCE]
    if len(on_line) < 2:
        return None
    direction = np.array([-normal[1], normal[0]]) / scale
    along = on_line @ direction
    a = on_line[int(np.argmin(along))]
    b = on_line[int(np.argmax(along))]
    segment = Segment(a.copy(), b.copy())
    if segment.length <= GEOMETRY_TOLERANCE:
        return None
    return segment


def clipped_voronoi(
    sites: Sequence[Sequence[float]] | NDArray[np.float64],
    domain: ConvexPolygon,
) -> VoronoiDiagram:
    """Voronoi diagram of the sites intersected with a convex domain.

    Each cell is the domain clipped by the bisector half-planes against every
    other site, nearest sites first so that later clips mostly leave the
    cell untouched.

    Raises:
        DomainError: no sites, or a site outside the domain.
        CoincidentSitesError: two sites closer than 1e-9.
    """
    pts = as_points(sites)
    _validate_sites(pts, domain)
    n = len(pts)
    normals, offsets = _bisectors(pts)
    order = np.argsort(squareform(pdist(pts)), axis=1) if n > 1 else np.zeros((1, 1), dtype=int)

    cells: List[ConvexPolygon] = []
    for i in range(n):
        verts = domain.vertices
        for j in order[i, 1:]:
            verts = clip_halfplane(verts, normals[i, j], offsets[i, j])
        cells.append(ConvexPolygon.from_vertices(verts))

    neighbors: List[List[int]] = [[] for _ in range(n)]
    shared_edges: Dict[EdgeKey, Segment] = {}
    for i, j in combinations(range(n), 2):
        segment = _edge_on_line(cells[i], normals[i, j], offsets[i, j])
        if segment is None:
            continue
        shared_edges[(i, j)] = segment
        neighbors[i].append(j)
        neighbors[j].append(i)

    return VoronoiDiagram(
        sites=pts,
        domain=domain,
        cells=cells,
        neighbors=neighbors,
        shared_edges=shared_edges,
    )


def shared_edge(d: VoronoiDiagram, i: int, j: int) -> Optional[Segment]:
    """Common boundary of cells i and j, or None when they are not adjacent."""
    if i == j:
        raise ValueError(f"shared_edge needs two distinct sites, got {i} twice")
    if i < j:
        return d.shared_edges.get((i, j))
    segment = d.shared_edges.get((j, i))
    return None if segment is None else segment.reversed()


def nearest_site(d: VoronoiDiagram, q: Point2) -> int:
    """Index of the site closest to q (lowest index on ties)."""
    return int(np.argmin(np.linalg.norm(d.sites - q, axis=1)))
