"""Minimum enclosing geodesic balls (circumradius) and Jung-type upper
bounds on the circumradius of a set of bounded diameter."""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

import numpy as np

from .geometry import (
    EUCLIDEAN,
    HYPERBOLIC,
    SPHERICAL,
    Ball,
    ModelError,
    Space,
    distance,
    geodesic_point,
    validate_point,
)

_SHUFFLE_SEED = 1828  # fixed shuffle for the randomized exact solver


@dataclass(frozen=True)
class EnclosingBall:
    """Solver output: the ball, the worst constraint violation over the
    inputs (<= 0 when the reported radius covers every point), and the
    number of solver iterations spent."""

    ball: Ball
    max_violation: float
    iterations: int


def _circumsphere(support: list) -> tuple:
    """Center and radius of the sphere through affinely independent points."""
    s = np.asarray(support, dtype=float)
    if len(s) == 1:
        return s[0], 0.0
    u = s[1:] - s[0]
    rhs = 0.5 * np.sum(u * u, axis=1)
    gram = np.inner(u, u)
    try:
        coef = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        coef = np.linalg.lstsq(gram, rhs, rcond=None)[0]
    center = s[0] + coef @ u
    return center, float(np.linalg.norm(center - s[0]))


def meb_euclidean(points) -> EnclosingBall:
    """Exact minimum enclosing ball in E^d (randomized incremental scheme).

    The supporting sphere is determined by at most d+1 input points; the
    recursion visits points in a fixed shuffled order, so the result is
    deterministic.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    n, d = pts.shape
    if n == 0:
        raise ModelError("need at least one point")
    if d > 10:
        raise ModelError(f"flat solver limited to d <= 10, got {d}")
    order = np.random.default_rng(_SHUFFLE_SEED).permutation(n)
    pts = pts[order]
    calls = 0

    def solve(m: int, boundary: list):
        nonlocal calls
        if m == 0 or len(boundary) == d + 1:
            calls += 1
            return _circumsphere(boundary) if boundary else None
        p = pts[m - 1]
        ball = solve(m - 1, boundary)
        if ball is not None and np.linalg.norm(p - ball[0]) <= ball[1] * (1 + 1e-12) + 1e-14:
            return ball
        return solve(m - 1, boundary + [p])

    limit = sys.getrecursionlimit()
    if 2 * n + 100 > limit:
        sys.setrecursionlimit(2 * n + 100)
    try:
        center, radius = solve(n, [])
    finally:
        sys.setrecursionlimit(limit)
    dists = np.linalg.norm(pts - center, axis=1)
    radius = max(radius, float(dists.max()))
    return EnclosingBall(Ball(center, radius), float(dists.max() - radius), calls)


def meb_geodesic(space: Space, points, iters: int = 2000) -> EnclosingBall:
    """Approximate minimum enclosing ball by farthest-point iteration.

    The center walks a fraction 1/(t+1) of the geodesic toward the current
    farthest input point (ties broken by lowest index); the best center seen
    is reported, so the radius is nonincreasing across checkpoints.  On the
    sphere the input must sit inside an open hemisphere.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if len(pts) == 0:
        raise ModelError("need at least one point")
    if iters < 1:
        raise ModelError("need at least one iteration")
    validate_point(space, pts)
    if len(pts) == 1:
        # self-distance rounds to ~sqrt(eps) through arccosh/arccos, so the
        # iteration cannot reach the exact answer; report it directly
        return EnclosingBall(Ball(pts[0], 0.0), 0.0, 0)
    if space.curvature == SPHERICAL:
        gram = np.clip(pts @ pts.T, -1.0, 1.0)
        if np.arccos(gram).max() >= math.pi - 1e-6:
            raise ModelError(
                "point set spans a closed hemisphere; farthest-point search "
                "is not sound there"
            )
    center = pts[0]
    best_center, best_radius = center, float(distance(space, pts, center).max())
    for t in range(1, iters + 1):
        dists = distance(space, pts, center)
        far = int(np.argmax(dists))
        radius = float(dists[far])
        if radius < best_radius:
            best_center, best_radius = center, radius
        center = geodesic_point(space, center, pts[far], 1.0 / (t + 1))
    radius = float(distance(space, pts, center).max())
    if radius < best_radius:
        best_center, best_radius = center, radius
    dists = distance(space, pts, best_center)
    return EnclosingBall(
        Ball(best_center, best_radius), float(dists.max() - best_radius), iters
    )


def meb(space: Space, points, iters: int = 2000) -> EnclosingBall:
    """Dispatch: exact solver when flat, farthest-point scheme otherwise."""
    if space.curvature == EUCLIDEAN:
        return meb_euclidean(points)
    return meb_geodesic(space, points, iters)


def jung_bound(space: Space, lam: float) -> float:
    """Upper bound on the circumradius of any set of diameter <= lam.

    sqrt(2d/(d+1)) lam/2 when flat; the arcsin / arcsinh transfer of the
    same coefficient on the sphere and the hyperboloid.  Equality holds at
    the regular d-simplex (an equilateral triangle when d = 2).
    """
    if lam <= 0:
        raise ModelError(f"diameter bound must be positive, got {lam}")
    coeff = math.sqrt(2.0 * space.dim / (space.dim + 1.0))
    if space.curvature == EUCLIDEAN:
        return coeff * lam / 2.0
    if space.curvature == SPHERICAL:
        s = coeff * math.sin(lam / 2.0)
        if s > 1.0 + 1e-12:
            raise ModelError(f"no spherical circumradius bound at lam = {lam}")
        return math.asin(min(s, 1.0))
    return math.asinh(coeff * math.sinh(lam / 2.0))


def relaxed_circumradius_bound(space: Space, lam: float, k: float | None = None) -> float:
    """Dimension-free circumradius bound for diameter-<= lam sets.

    Weaker than jung_bound but independent of d: lam/sqrt(2) when flat,
    (pi/(2 sqrt 2)) lam on the sphere for lam < pi/2, and
    (sinh k/(sqrt 2 k)) lam on the hyperboloid at working scale k > lam/2.
    """
    if lam <= 0:
        raise ModelError(f"diameter bound must be positive, got {lam}")
    if space.curvature == EUCLIDEAN:
        return lam / math.sqrt(2.0)
    if space.curvature == SPHERICAL:
        if lam >= math.pi / 2:
            raise ModelError(f"spherical relaxed bound needs lam < pi/2, got {lam}")
        return math.pi * lam / (2.0 * math.sqrt(2.0))
    if k is None:
        k = space.k_cap
    if k is None or k <= 0:
        raise ModelError("hyperbolic relaxed bound needs a positive scale k")
    if lam >= 2.0 * k:
        raise ModelError(f"hyperbolic relaxed bound needs lam < 2k, got lam={lam}, k={k}")
    return math.sinh(k) / (math.sqrt(2.0) * k) * lam
