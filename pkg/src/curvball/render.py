"""SVG figures for planar instances in all three geometries.

Euclidean instances draw in native coordinates, the sphere through an
orthographic view of the front hemisphere, and the hyperbolic plane
through the Poincare disk.  Regions defined only by membership oracles
are shown as filled contours of the indicator on a projected grid; exact
disk-polygon boundaries are drawn from their arcs.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .contraction import (
    ContractionParams,
    sample_contracted_points,
    sample_separated_points,
)
from .diskpoly import disk_polygon
from .geometry import (
    EUCLIDEAN,
    SPHERICAL,
    Ball,
    ModelError,
    Space,
    _plane_value,
    bisector,
    transport_from_origin,
)
from .measure import RngSpec, sample_uniform_ball
from .oracles import UnionOfBalls, dual_of_points, dual_of_union, symmetrize

_GRID = 240
_ARC_SAMPLES = 96


def _project(space: Space, pts: np.ndarray) -> np.ndarray:
    pts = np.atleast_2d(pts)
    if space.curvature == EUCLIDEAN:
        return pts
    if space.curvature == SPHERICAL:
        return pts[:, :2]
    return pts[:, :2] / (1.0 + pts[:, 2:3])


def _grid(space: Space, extent: float):
    """Projected grid plus embedded coordinates and a validity mask."""
    xs = np.linspace(-extent, extent, _GRID)
    gx, gy = np.meshgrid(xs, xs)
    flat_xy = np.column_stack([gx.ravel(), gy.ravel()])
    if space.curvature == EUCLIDEAN:
        return gx, gy, flat_xy, np.ones(len(flat_xy), dtype=bool)
    s = np.sum(flat_xy**2, axis=1)
    if space.curvature == SPHERICAL:
        valid = s <= 1.0
        z = np.sqrt(np.clip(1.0 - s, 0.0, None))
        emb = np.column_stack([flat_xy, z])
    else:
        valid = s < 0.9999
        denom = np.where(valid, 1.0 - s, 1.0)
        emb = np.column_stack(
            [2.0 * flat_xy / denom[:, None], (1.0 + s) / denom]
        )
    emb[~valid] = space.origin()
    return gx, gy, emb, valid


def _indicator(oracle, emb, valid) -> np.ndarray:
    mask = np.zeros(len(emb))
    mask[valid] = oracle.member_many(emb[valid]).astype(float)
    return mask.reshape(_GRID, _GRID)


def _circle_points(space: Space, center, radius: float, n: int = _ARC_SAMPLES):
    theta = np.linspace(0.0, 2.0 * math.pi, n)
    if space.curvature == EUCLIDEAN:
        return np.asarray(center) + radius * np.column_stack(
            [np.cos(theta), np.sin(theta)]
        )
    if space.curvature == SPHERICAL:
        ring = np.column_stack(
            [
                math.sin(radius) * np.cos(theta),
                math.sin(radius) * np.sin(theta),
                np.full_like(theta, math.cos(radius)),
            ]
        )
    else:
        ring = np.column_stack(
            [
                math.sinh(radius) * np.cos(theta),
                math.sinh(radius) * np.sin(theta),
                np.full_like(theta, math.cosh(radius)),
            ]
        )
    return ring @ transport_from_origin(space, center).T


def _setup_axes(ax, space: Space, extent: float):
    ax.set_aspect("equal")
    ax.set_xlim(-extent, extent)
    ax.set_ylim(-extent, extent)
    if space.curvature != EUCLIDEAN:
        rim = plt.Circle((0, 0), 1.0, fill=False, color="0.6", linewidth=0.8)
        ax.add_patch(rim)


def _extent_for(space: Space, pts: np.ndarray, r: float) -> float:
    if space.curvature != EUCLIDEAN:
        return 1.05
    flat = np.atleast_2d(pts)
    return float(np.abs(flat).max() + r) * 1.1 + 0.05


def _draw_generators(ax, space: Space, centers, radius: float, color="tab:blue"):
    for c in np.atleast_2d(centers):
        ring = _project(space, _circle_points(space, c, radius))
        ax.plot(ring[:, 0], ring[:, 1], color=color, linewidth=0.9, alpha=0.8)
    flat = _project(space, centers)
    ax.plot(flat[:, 0], flat[:, 1], ".", color=color, markersize=4)


def _require_planar(space: Space):
    if space.dim != 2:
        raise ModelError("rendering covers two-dimensional instances only")


def render_dual_instance(space: Space, points, r: float, out: str) -> str:
    """Generator circles plus the r-dual region; exact boundary when flat."""
    _require_planar(space)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    dual = dual_of_points(space, points, r)
    extent = _extent_for(space, points, r)
    fig, ax = plt.subplots(figsize=(5, 5))
    _setup_axes(ax, space, extent)
    _draw_generators(ax, space, points, r)
    if space.curvature == EUCLIDEAN:
        poly = disk_polygon(points, r)
        if poly.degenerate == "full-disk":
            ring = _circle_points(space, points[0], r)
            ax.fill(ring[:, 0], ring[:, 1], color="tab:orange", alpha=0.45)
        elif poly.degenerate is None:
            pieces = [
                poly.centers[i]
                + r
                * np.column_stack(
                    [
                        np.cos(np.linspace(ts, te, _ARC_SAMPLES)),
                        np.sin(np.linspace(ts, te, _ARC_SAMPLES)),
                    ]
                )
                for i, ts, te in poly.arcs
            ]
            boundary = np.vstack(pieces)
            ax.fill(boundary[:, 0], boundary[:, 1], color="tab:orange", alpha=0.45)
    else:
        gx, gy, emb, valid = _grid(space, extent)
        ax.contourf(
            gx, gy, _indicator(dual, emb, valid),
            levels=[0.5, 1.5], colors=["tab:orange"], alpha=0.45,
        )
    ax.set_title(f"{space.name} d=2, dual radius {r:g}")
    fig.savefig(out, format="svg", bbox_inches="tight")
    plt.close(fig)
    return out


def render_symmetrization_demo(space: Space, out: str, seed: int = 7) -> str:
    """Before/after panels of a two-point symmetrization of a ball union."""
    _require_planar(space)
    rng = RngSpec(seed)
    gen = rng.generator()
    n_balls = int(gen.integers(2, 5))
    centers = sample_uniform_ball(space, space.origin(), 0.45, rng.child(0), n=n_balls)
    radii = gen.uniform(0.15, 0.35, size=n_balls)
    union = UnionOfBalls(space, [Ball(c, float(s)) for c, s in zip(centers, radii)])
    a, b = sample_uniform_ball(space, space.origin(), 0.5, rng.child(1), n=2)
    plane = bisector(space, a, b)
    mirrored = symmetrize(union, plane)

    extent = _extent_for(space, centers, float(radii.max()))
    gx, gy, emb, valid = _grid(space, extent)
    plane_vals = np.zeros(len(emb))
    plane_vals[valid] = _plane_value(space, plane, emb[valid])
    plane_vals = plane_vals.reshape(_GRID, _GRID)

    fig, axes = plt.subplots(1, 2, figsize=(10, 5))
    for ax, region, title in [
        (axes[0], union, "before"),
        (axes[1], mirrored, "after"),
    ]:
        _setup_axes(ax, space, extent)
        ax.contourf(
            gx, gy, _indicator(region, emb, valid),
            levels=[0.5, 1.5], colors=["tab:green"], alpha=0.5,
        )
        ax.contour(gx, gy, plane_vals, levels=[0.0], colors=["k"], linewidths=1.0)
        ax.set_title(f"{space.name}: {title}")
    fig.savefig(out, format="svg", bbox_inches="tight")
    plt.close(fig)
    return out


def render_contraction_demo(p: ContractionParams, out: str, seed: int = 7) -> str:
    """Separated and contracted point sets with their duals, side by side."""
    _require_planar(p.space)
    rng = RngSpec(seed)
    separated = sample_separated_points(p, rng.child(0))
    contracted = sample_contracted_points(p, rng.child(1))
    extent = _extent_for(p.space, separated, p.delta)
    gx, gy, emb, valid = _grid(p.space, extent)

    fig, axes = plt.subplots(1, 2, figsize=(10, 5))
    for ax, pts, color, title in [
        (axes[0], separated, "tab:blue", "separated"),
        (axes[1], contracted, "tab:red", "contracted"),
    ]:
        _setup_axes(ax, p.space, extent)
        dual = dual_of_points(p.space, pts, p.delta)
        ax.contourf(
            gx, gy, _indicator(dual, emb, valid),
            levels=[0.5, 1.5], colors=[color], alpha=0.35,
        )
        flat = _project(p.space, pts)
        ax.plot(flat[:, 0], flat[:, 1], "o", color=color, markersize=4)
        ax.set_title(f"{p.space.name}: {title} (N={p.n_points})")
    fig.savefig(out, format="svg", bbox_inches="tight")
    plt.close(fig)
    return out


def render_union_dual_demo(space: Space, r: float, out: str, seed: int = 7) -> str:
    """A union of balls and its r-dual in one panel."""
    _require_planar(space)
    space.check_dual_radius(r)
    rng = RngSpec(seed)
    gen = rng.generator()
    n_balls = int(gen.integers(1, 5))
    centers = sample_uniform_ball(space, space.origin(), 0.6 * r, rng.child(0), n=n_balls)
    radii = gen.uniform(0.1 * r, 0.35 * r, size=n_balls)
    union = UnionOfBalls(space, [Ball(c, float(s)) for c, s in zip(centers, radii)])
    dual = dual_of_union(union, r, allow_mixed=True)
    extent = _extent_for(space, centers, r)
    gx, gy, emb, valid = _grid(space, extent)
    fig, ax = plt.subplots(figsize=(5.5, 5.5))
    _setup_axes(ax, space, extent)
    ax.contourf(
        gx, gy, _indicator(union, emb, valid),
        levels=[0.5, 1.5], colors=["tab:green"], alpha=0.5,
    )
    ax.contourf(
        gx, gy, _indicator(dual, emb, valid),
        levels=[0.5, 1.5], colors=["tab:purple"], alpha=0.4,
    )
    for c, s in zip(centers, radii):
        ring = _project(space, _circle_points(space, c, float(s)))
        ax.plot(ring[:, 0], ring[:, 1], color="tab:green", linewidth=0.8)
    ax.set_title(f"{space.name}: union (green) and its {r:g}-dual (purple)")
    fig.savefig(out, format="svg", bbox_inches="tight")
    plt.close(fig)
    return out
