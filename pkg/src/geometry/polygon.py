#!/usr/bin/env python3
"""Planar primitives: points, segments and convex polygons."""

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from numpy.typing import NDArray

logger = logging.getLogger(__name__)

# Tolerances in arena units
GEOMETRY_TOLERANCE = 1e-9
COLLINEAR_TOLERANCE = 1e-9

Point2 = NDArray[np.float64]


class GeometryError(ValueError):
    """Base class for geometry failures."""


class CoincidentSitesError(GeometryError):
    """Two Voronoi sites closer than the duplicate tolerance."""


class DomainError(GeometryError):
    """A point that must lie inside the domain does not."""


class DegeneratePolygonError(GeometryError):
    """Polygon with fewer than three usable vertices or zero area."""


def point(x: float, y: float) -> Point2:
    """Build a finite 2-D point."""
    p = np.array([x, y], dtype=np.float64)
    if not np.all(np.isfinite(p)):
        raise GeometryError(f"Point components must be finite, got ({x}, {y})")
    return p


def as_points(points: Iterable[Sequence[float]]) -> NDArray[np.float64]:
    """Stack a sequence of points into an (n, 2) float array."""
    arr = np.asarray([tuple(p) for p in points], dtype=np.float64).reshape(-1, 2)
    if not np.all(np.isfinite(arr)):
        raise GeometryError("Point components must be finite")
    return arr


def _signed_area(vertices: NDArray[np.float64]) -> float:
    x = vertices[:, 0]
    y = vertices[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def _drop_repeated(vertices: NDArray[np.float64]) -> NDArray[np.float64]:
    """Remove vertices closer than the tolerance to their cyclic predecessor."""
    if len(vertices) < 2:
        return vertices
    gaps = np.linalg.norm(vertices - np.roll(vertices, 1, axis=0), axis=1)
    keep = gaps > GEOMETRY_TOLERANCE
    if not np.any(keep):
        return vertices[:1]
    return vertices[keep]


def _drop_collinear(vertices: NDArray[np.float64]) -> NDArray[np.float64]:
    """Remove vertices lying on the segment joining their neighbours."""
    verts = vertices
    while len(verts) > 3:
        prev_v = np.roll(verts, 1, axis=0)
        edge = np.roll(verts, -1, axis=0) - prev_v
        offset = verts - prev_v
        lengths = np.linalg.norm(edge, axis=1)
        cross = edge[:, 0] * offset[:, 1] - edge[:, 1] * offset[:, 0]
        collinear = (lengths > GEOMETRY_TOLERANCE) & (
            np.abs(cross) <= COLLINEAR_TOLERANCE * lengths
        )
        if not np.any(collinear):
            break
        verts = verts[~collinear]
    return verts


@dataclass(frozen=True)
class Segment:
    """Straight segment between two points."""
    a: Point2
    b: Point2

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.b - self.a))

    @property
    def centroid(self) -> Point2:
        return 0.5 * (self.a + self.b)

    def reversed(self) -> "Segment":
        return Segment(self.b, self.a)


@dataclass(frozen=True, eq=False)
class ConvexPolygon:
    """Convex polygon stored counter-clockwise.

    Use ConvexPolygon.from_vertices to normalize orientation and strip
    repeated or collinear vertices; the raw constructor trusts its input.
    """
    vertices: NDArray[np.float64]

    @classmethod
    def from_vertices(cls, vertices: Iterable[Sequence[float]]) -> "ConvexPolygon":
        verts = _drop_repeated(as_points(vertices))
        if len(verts) < 3:
            raise DegeneratePolygonError(
                f"Polygon needs at least 3 distinct vertices, got {len(verts)}"
            )
        if _signed_area(verts) < 0:
            verts = verts[::-1].copy()
        verts = _drop_collinear(verts)
        if len(verts) < 3 or _signed_area(verts) <= 0:
            raise DegeneratePolygonError("Polygon has zero area")
        return cls(verts)

    @classmethod
    def box(cls, xmin: float, ymin: float, xmax: float, ymax: float) -> "ConvexPolygon":
        """Axis-aligned rectangle."""
        return cls.from_vertices(
            [(xmin, ymin), (xmax, ymin), (xmax, ymax), (xmin, ymax)]
        )

    def __len__(self) -> int:
        return len(self.vertices)

    def edges(self) -> list[Segment]:
        n = len(self.vertices)
        return [Segment(self.vertices[k], self.vertices[(k + 1) % n]) for k in range(n)]

    def bounds(self) -> tuple[float, float, float, float]:
        """(xmin, ymin, xmax, ymax)"""
        lo = self.vertices.min(axis=0)
        hi = self.vertices.max(axis=0)
        return float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1])


def polygon_area(p: ConvexPolygon) -> float:
    """Shoelace area of a polygon."""
    if len(p.vertices) < 3:
        raise DegeneratePolygonError(
            f"Area needs at least 3 vertices, got {len(p.vertices)}"
        )
    return abs(_signed_area(p.vertices))


def polygon_centroid(p: ConvexPolygon) -> Point2:
    """Area-weighted centroid of a polygon."""
    verts = p.vertices
    if len(verts) < 3:
        raise DegeneratePolygonError(
            f"Centroid needs at least 3 vertices, got {len(verts)}"
        )
    x = verts[:, 0]
    y = verts[:, 1]
    x_next = np.roll(x, -1)
    y_next = np.roll(y, -1)
    cross = x * y_next - x_next * y
    area = 0.5 * float(np.sum(cross))
    if abs(area) <= GEOMETRY_TOLERANCE**2:
        raise DegeneratePolygonError("Centroid of a zero-area polygon is undefined")
    cx = float(np.sum((x + x_next) * cross)) / (6.0 * area)
    cy = float(np.sum((y + y_next) * cross)) / (6.0 * area)
    return np.array([cx, cy], dtype=np.float64)


def contains(p: ConvexPolygon, q: Point2, tol: float = GEOMETRY_TOLERANCE) -> bool:
    """True when q lies inside or on the boundary of p."""
    verts = p.vertices
    edge = np.roll(verts, -1, axis=0) - verts
    offset = q - verts
    cross = edge[:, 0] * offset[:, 1] - edge[:, 1] * offset[:, 0]
    lengths = np.linalg.norm(edge, axis=1)
    return bool(np.all(cross >= -tol * lengths))


def project_onto(p: ConvexPolygon, q: Point2) -> Point2:
    """Euclidean projection of q onto p (q itself when inside)."""
    if contains(p, q, tol=0.0):
        return np.array(q, dtype=np.float64)
    starts = p.vertices
    edges = np.roll(starts, -1, axis=0) - starts
    denom = np.einsum("ij,ij->i", edges, edges)
    along = np.einsum("ij,ij->i", q - starts, edges)
    s = np.clip(np.divide(along, denom, out=np.zeros_like(along), where=denom > 0), 0.0, 1.0)
    candidates = starts + s[:, None] * edges
    best = int(np.argmin(np.linalg.norm(candidates - q, axis=1)))
    return candidates[best].copy()


def clip_halfplane(
    vertices: NDArray[np.float64],
    normal: Point2,
    offset: float,
) -> NDArray[np.float64]:
    """Clip a convex polygon to the half-plane {q : normal . q <= offset}.

    Returns the clipped vertex array, possibly with fewer than 3 rows when
    the polygon lies outside the half-plane.
    """
    scale = float(np.linalg.norm(normal))
    signed = (vertices @ normal - offset) / scale
    inside = signed <= GEOMETRY_TOLERANCE
    if np.all(inside):
        return vertices
    if not np.any(inside):
        return np.empty((0, 2), dtype=np.float64)

    following = np.roll(vertices, -1, axis=0)
    signed_next = np.roll(signed, -1)
    crossing = inside != np.roll(inside, -1)
    t = np.divide(signed, signed - signed_next, out=np.zeros_like(signed), where=crossing)
    hits = vertices + t[:, None] * (following - vertices)

    # Vertex k (if kept) then the crossing on edge k -> k+1 (if any)
    slots = np.stack([vertices, hits], axis=1).reshape(-1, 2)
    keep = np.stack([inside, crossing], axis=1).reshape(-1)
    return _drop_repeated(slots[keep])
