"""Exact planar kernel for intersections of congruent disks (disk polygons).

Works entirely in E^2 with one common radius.  The boundary of the
intersection is a cyclic chain of outward-bulging arcs; the area is the
shoelace sum over the arc junction points plus one circular-segment
correction per arc.  This kernel is the independent oracle the Monte Carlo
machinery is checked against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .enclosing import meb_euclidean
from .geometry import ModelError

_SNAP = 1e-12       # coincidence snapping for angles and the point flag
_CHAIN_TOL = 1e-6   # arc endpoints must meet at least this well


@dataclass(frozen=True)
class ArcPolygon:
    """Boundary description of an intersection of congruent disks.

    ``arcs`` holds (center_index, theta_start, theta_end) with
    theta_end >= theta_start and theta_end - theta_start <= pi, traversed
    counterclockwise around the region; ``vertices[k]`` is the junction
    between arc k and arc k+1 (cyclically).  ``degenerate`` is None for a
    proper region, otherwise "empty", "point", or "full-disk".  ``witness``
    carries the point for the point case.
    """

    centers: np.ndarray
    radius: float
    vertices: np.ndarray
    arcs: tuple
    degenerate: str | None = None
    witness: np.ndarray | None = None


def lens_area(delta: float, r: float) -> float:
    """Area of the intersection of two radius-r disks at center distance
    delta: 2 r^2 arccos(delta/(2r)) - (delta/2) sqrt(4 r^2 - delta^2)."""
    if r <= 0:
        raise ModelError(f"radius must be positive, got {r}")
    if not 0.0 <= delta <= 2.0 * r:
        raise ModelError(f"center distance {delta} outside [0, 2r] = [0, {2 * r}]")
    return 2.0 * r**2 * math.acos(delta / (2.0 * r)) - (delta / 2.0) * math.sqrt(
        4.0 * r**2 - delta**2
    )


def _dedup(centers: np.ndarray) -> np.ndarray:
    out = []
    for c in centers:
        if not any(np.linalg.norm(c - o) <= _SNAP for o in out):
            out.append(c)
    return np.asarray(out)


def disk_polygon(centers, r: float) -> ArcPolygon:
    """Boundary of the intersection of radius-r disks at the given centers.

    Degenerate results are detected exactly through the flat enclosing-ball
    solver: the intersection is empty iff the smallest ball enclosing the
    centers has radius above r, and shrinks to a single point exactly at
    radius r (the enclosing center is then the witness).
    """
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    if centers.shape[1] != 2:
        raise ModelError("disk polygons live in the plane")
    if r <= 0:
        raise ModelError(f"radius must be positive, got {r}")
    centers = _dedup(centers)
    n = len(centers)
    if n == 1:
        return ArcPolygon(
            centers, r, np.zeros((0, 2)), ((0, 0.0, 2.0 * math.pi),), "full-disk"
        )
    enc = meb_euclidean(centers)
    if enc.ball.radius > r + _SNAP:
        return ArcPolygon(centers, r, np.zeros((0, 2)), (), "empty")
    if enc.ball.radius >= r - _SNAP:
        w = np.asarray(enc.ball.center)
        return ArcPolygon(centers, r, w[None, :], (), "point", w)

    # Active interval of each circle: on circle i, the points inside disk j
    # satisfy cos(theta - alpha_ij) >= d_ij / (2r), an arc of half-width
    # w_ij <= pi/2 around the direction alpha_ij toward c_j.  Intersecting
    # such arcs keeps a single (possibly empty) arc because every constraint
    # spans at most half the circle.
    arcs = []
    for i in range(n):
        diff = centers - centers[i]
        dists = np.linalg.norm(diff, axis=1)
        gamma, half = None, None
        alive = True
        for j in range(n):
            if j == i:
                continue
            alpha = math.atan2(diff[j, 1], diff[j, 0])
            w = math.acos(min(max(dists[j] / (2.0 * r), -1.0), 1.0))
            if gamma is None:
                gamma, half = alpha, w
                continue
            shift = alpha - gamma
            shift -= 2.0 * math.pi * round(shift / (2.0 * math.pi))
            lo = max(-half, shift - w)
            hi = min(half, shift + w)
            if lo > hi:
                alive = False
                break
            gamma, half = gamma + 0.5 * (lo + hi), 0.5 * (hi - lo)
        if alive and half is not None and half > _SNAP:
            arcs.append((i, gamma - half, gamma + half))

    if not arcs:
        raise ModelError("no active arcs for a region with interior; inconsistent input")

    def arc_point(item, theta):
        i = item[0]
        return centers[i] + r * np.array([math.cos(theta), math.sin(theta)])

    mids = np.array([arc_point(a, 0.5 * (a[1] + a[2])) for a in arcs])
    centroid = mids.mean(axis=0)
    order = np.argsort(np.arctan2(mids[:, 1] - centroid[1], mids[:, 0] - centroid[0]))
    arcs = [arcs[k] for k in order]

    verts = []
    for k, arc in enumerate(arcs):
        nxt = arcs[(k + 1) % len(arcs)]
        p_end = arc_point(arc, arc[2])
        p_start = arc_point(nxt, nxt[1])
        if np.linalg.norm(p_end - p_start) > _CHAIN_TOL:
            raise ModelError("arc chain failed to close; degenerate configuration")
        verts.append(0.5 * (p_end + p_start))
    vertices = np.asarray(verts)
    return ArcPolygon(centers, r, vertices, tuple(arcs))


def arc_polygon_area(poly: ArcPolygon) -> float:
    """Exact area: shoelace over the junction polygon plus one circular
    segment (r^2/2)(theta - sin theta) per boundary arc."""
    if poly.degenerate == "empty" or poly.degenerate == "point":
        return 0.0
    if poly.degenerate == "full-disk":
        return math.pi * poly.radius**2
    v = poly.vertices
    x, y = v[:, 0], v[:, 1]
    shoelace = 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))
    segments = sum(
        0.5 * poly.radius**2 * ((te - ts) - math.sin(te - ts))
        for _, ts, te in poly.arcs
    )
    return abs(shoelace) + segments
