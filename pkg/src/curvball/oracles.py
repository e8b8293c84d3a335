"""Membership oracles for the compact sets the library manipulates: unions
of balls, r-dual sets (ball intersections), reflections, two-point
symmetrizations, and one-sided inclusion tests between them.

An oracle is an exact membership predicate plus a certified bounding ball.
Unions of balls and ball intersections carry their structure (so duals and
reflections stay exact); everything else composes predicates.  Inclusion
tests are refutation-only: a returned witness is an exact counterexample,
while "unrefuted" only accumulates statistical confidence with the sample
budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .enclosing import meb, meb_euclidean
from .geometry import (
    EUCLIDEAN,
    SPHERICAL,
    Ball,
    ModelError,
    OrientedHyperplane,
    Space,
    distance,
    geodesic_point,
    project,
    reflect,
    side,
    validate_point,
)
from .measure import RngSpec, sample_uniform_ball

_MEB_ITERS = 500          # bound computation only; any enclosing ball will do
_REFUTE_TOL = 1e-12       # a witness must overshoot by more than this


class DegenerateSetError(ModelError):
    """Rejection sampling starved: the set has no usable volume."""


class SetOracle:
    """Compact set given by an exact predicate and a certified bound.

    ``member_many`` takes an (n, embed_dim) array and returns a boolean
    array; ``member`` is the single-point convenience.  Instances are
    immutable by convention.
    """

    def __init__(self, space: Space, bound: Ball, member_many, descriptor: str = "composite"):
        self.space = space
        self.bound = bound
        self.descriptor = descriptor
        self._member_many = member_many

    def member_many(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return np.asarray(self._member_many(pts), dtype=bool)

    def member(self, x) -> bool:
        return bool(self.member_many(np.asarray(x, dtype=float)[None, :])[0])


class UnionOfBalls(SetOracle):
    """Finite union of closed geodesic balls (radii may differ)."""

    def __init__(self, space: Space, balls):
        balls = tuple(b for b in balls if not b.empty)
        if not balls:
            raise ModelError("union needs at least one non-empty ball")
        for b in balls:
            b.check(space)
        self.balls = balls
        centers = np.stack([b.center for b in balls])
        enc = meb(space, centers, iters=_MEB_ITERS)
        radius = enc.ball.radius + max(b.radius for b in balls)
        if space.curvature == SPHERICAL:
            radius = min(radius, math.pi)
        super().__init__(space, Ball(enc.ball.center, radius), None, "union-of-balls")

    def member_many(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        hit = np.zeros(len(pts), dtype=bool)
        for b in self.balls:
            hit |= distance(self.space, pts, b.center) <= b.radius
        return hit

    @property
    def common_radius(self) -> float:
        radii = {b.radius for b in self.balls}
        if len(radii) != 1:
            raise ModelError("union has mixed radii")
        return radii.pop()


class BallIntersection(SetOracle):
    """Finite intersection of closed geodesic balls: the exact form of the
    r-dual of a finite set.  May represent the empty set (it then contains
    a canonical empty ball)."""

    def __init__(self, space: Space, balls, mixed_extension: bool = False):
        balls = tuple(balls)
        if not balls:
            raise ModelError("intersection needs at least one ball")
        for b in balls:
            if not b.empty:
                b.check(space)
        self.balls = balls
        self.mixed_extension = mixed_extension
        bound = min(balls, key=lambda b: (not b.empty, b.radius))
        super().__init__(space, bound, None, "ball-intersection")

    @property
    def trivially_empty(self) -> bool:
        return any(b.empty for b in self.balls)

    def member_many(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.trivially_empty:
            return np.zeros(len(pts), dtype=bool)
        ok = np.ones(len(pts), dtype=bool)
        for b in self.balls:
            ok &= distance(self.space, pts, b.center) <= b.radius
            if not ok.any():
                break
        return ok

    def max_violation(self, pts) -> np.ndarray:
        """Per point: max over balls of distance minus radius (<= 0 inside)."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        worst = np.full(len(pts), -np.inf)
        for b in self.balls:
            if b.empty:
                return np.full(len(pts), np.inf)
            worst = np.maximum(worst, distance(self.space, pts, b.center) - b.radius)
        return worst


# ------------------------------------------------------------------ duals


def dual_of_points(space: Space, points, r: float) -> BallIntersection:
    """The r-dual of a finite point set: the intersection of r-balls
    centered at the points."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if len(pts) == 0:
        raise ModelError("dual of an empty point set is the whole space")
    space.check_dual_radius(r)
    validate_point(space, pts)
    return BallIntersection(space, [Ball(p, r) for p in pts])


def dual_of_union(union: UnionOfBalls, t: float, allow_mixed: bool = False) -> BallIntersection:
    """The t-dual of a union of s-balls: exactly the intersection of
    (t - s)-balls at the same centers.

    With mixed radii the per-ball rule t - s_i still holds; that case is an
    extension beyond the congruent setting and must be requested explicitly
    (the result is tagged ``mixed_extension``).  A negative derived radius
    makes the whole dual the canonical empty set.
    """
    space = union.space
    space.check_dual_radius(t)
    radii = [t - b.radius for b in union.balls]
    mixed = len({b.radius for b in union.balls}) != 1
    if mixed and not allow_mixed:
        raise ModelError(
            "dual of a mixed-radius union needs allow_mixed=True (congruent "
            "balls are the supported setting)"
        )
    worst = min(range(len(radii)), key=lambda i: radii[i])
    if radii[worst] < 0:
        empty = Ball.of(union.balls[worst].center, radii[worst])
        return BallIntersection(space, [empty], mixed_extension=mixed)
    balls = [Ball(b.center, t - b.radius) for b in union.balls]
    return BallIntersection(space, balls, mixed_extension=mixed)


def _orthonormal_to_pair(space: Space, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Form-unit vector orthogonal (in the model's form) to two points, d=2."""
    if space.curvature == SPHERICAL:
        w = np.cross(a, b)
        return w / np.linalg.norm(w)
    w = np.cross(a * np.array([1.0, 1.0, -1.0]), b * np.array([1.0, 1.0, -1.0]))
    norm = math.sqrt(w[0] ** 2 + w[1] ** 2 - w[2] ** 2)
    return w / norm


def spindle_pair(space: Space, a, b, r: float) -> BallIntersection:
    """Exact r-hull of two points in dimension 2.

    The hull of {a, b} is the intersection of all r-balls containing both;
    in the plane (flat or curved) that reduces to the two extreme balls
    whose boundary passes through a and b.  Every member is a certified
    point of the r-hull, which is what the double-dual tests lean on.
    """
    if space.dim != 2:
        raise ModelError("two-point hull construction is specific to d = 2")
    space.check_dual_radius(r)
    a = validate_point(space, np.asarray(a, dtype=float))
    b = validate_point(space, np.asarray(b, dtype=float))
    dist_ab = distance(space, a, b)
    if dist_ab > 2.0 * r:
        raise ModelError(f"points at distance {dist_ab} > 2r have no r-hull")
    if space.curvature == SPHERICAL and dist_ab >= math.pi - 1e-9:
        raise ModelError("antipodal points have no unique hull construction")
    if dist_ab < 1e-15:
        return BallIntersection(space, [Ball(a, 0.0)])
    if space.curvature == EUCLIDEAN:
        mid = 0.5 * (a + b)
        h = math.sqrt(max(r**2 - (dist_ab / 2.0) ** 2, 0.0))
        n = np.array([-(b - a)[1], (b - a)[0]]) / dist_ab
        v1, v2 = mid + h * n, mid - h * n
    else:
        w = _orthonormal_to_pair(space, a, b)
        if space.curvature == SPHERICAL:
            g = float(np.dot(a, b))
            alpha = math.cos(r) / (1.0 + g)
            c = math.sqrt(max(1.0 - 2.0 * math.cos(r) ** 2 / (1.0 + g), 0.0))
        else:
            h_ab = math.cosh(dist_ab)
            alpha = math.cosh(r) / (1.0 + h_ab)
            c = math.sqrt(max(2.0 * math.cosh(r) ** 2 / (1.0 + h_ab) - 1.0, 0.0))
        v1 = project(space, alpha * (a + b) + c * w)
        v2 = project(space, alpha * (a + b) - c * w)
    return BallIntersection(space, [Ball(v1, r), Ball(v2, r)])


# ------------------------------------------------------------ set algebra


def _reflect_ball(space: Space, plane: OrientedHyperplane, ball: Ball) -> Ball:
    if ball.empty:
        return ball
    return Ball(reflect(space, plane, ball.center), ball.radius)


def reflect_set(K: SetOracle, plane: OrientedHyperplane) -> SetOracle:
    """The mirror image of an oracle set; exact for ball structures."""
    space = K.space
    if isinstance(K, UnionOfBalls):
        return UnionOfBalls(space, [_reflect_ball(space, plane, b) for b in K.balls])
    if isinstance(K, BallIntersection):
        return BallIntersection(
            space,
            [_reflect_ball(space, plane, b) for b in K.balls],
            mixed_extension=K.mixed_extension,
        )
    fn = lambda pts: K.member_many(reflect(space, plane, pts))
    return SetOracle(space, _reflect_ball(space, plane, K.bound), fn, "reflected")


def _merged_bound(space: Space, b1: Ball, b2: Ball) -> Ball:
    """A ball containing two balls: midpoint center, half-gap plus radius."""
    if b1.empty:
        return b2
    if b2.empty:
        return b1
    gap = distance(space, b1.center, b2.center)
    if gap < 1e-15:
        return Ball(b1.center, max(b1.radius, b2.radius))
    mid = geodesic_point(space, b1.center, b2.center, 0.5)
    radius = gap / 2.0 + max(b1.radius, b2.radius)
    if space.curvature == SPHERICAL:
        radius = min(radius, math.pi)
    return Ball(mid, radius)


def symmetrize(K: SetOracle, plane: OrientedHyperplane) -> SetOracle:
    """Two-point symmetrization: keep what the set and its mirror share,
    and push the symmetric difference to the positive side of the plane."""
    space = K.space

    def fn(pts):
        refl = reflect(space, plane, pts)
        here = K.member_many(pts)
        there = K.member_many(refl)
        plus = side(space, plane, pts) >= 0
        return (here & there) | ((here | there) & plus)

    bound = _merged_bound(space, K.bound, _reflect_ball(space, plane, K.bound))
    return SetOracle(space, bound, fn, "symmetrized")


def canonical_parts(K: SetOracle, plane: OrientedHyperplane):
    """Disjoint decomposition of the symmetrization into the symmetric core,
    the retained positive-side part, and the reflected negative-side part.

    Pointwise: core holds x with both x and its mirror in K; plus holds
    x in K (mirror outside) on the positive side; moved holds mirrors of
    negative-side points of K whose mirror image was outside.
    """
    space = K.space

    def core_fn(pts):
        return K.member_many(pts) & K.member_many(reflect(space, plane, pts))

    def plus_fn(pts):
        refl = reflect(space, plane, pts)
        return (
            K.member_many(pts)
            & ~K.member_many(refl)
            & (side(space, plane, pts) >= 0)
        )

    def moved_fn(pts):
        refl = reflect(space, plane, pts)
        return (
            K.member_many(refl)
            & ~K.member_many(pts)
            & (side(space, plane, pts) >= 0)
        )

    mirror = _reflect_ball(space, plane, K.bound)
    core = SetOracle(space, K.bound, core_fn, "composite")
    plus = SetOracle(space, K.bound, plus_fn, "composite")
    moved = SetOracle(space, mirror, moved_fn, "composite")
    return core, plus, moved


# ------------------------------------------------------- sampling and tests


def sample_members(K: SetOracle, n: int, rng: RngSpec, starvation_factor: int = 100):
    """Up to n points of K by rejection from its bounding ball.

    Raises DegenerateSetError when ``starvation_factor * n`` draws produce
    no member at all (the set has no usable volume).  May return fewer than
    n points when acceptance is extremely low but nonzero.
    """
    if n < 1:
        raise ModelError("need at least one sample")
    if K.bound.empty:
        raise DegenerateSetError("bounding ball is empty")
    chunks = []
    got = 0
    drawn = 0
    block = max(256, int(n))
    attempt = 0
    while got < n and drawn < starvation_factor * n:
        pts = sample_uniform_ball(
            K.space, K.bound.center, K.bound.radius, rng.child(attempt), n=block
        )
        keep = K.member_many(pts)
        if keep.any():
            chunks.append(pts[keep])
            got += int(np.count_nonzero(keep))
        drawn += block
        attempt += 1
    if got == 0:
        raise DegenerateSetError(
            f"no member found in {drawn} draws from the bounding ball"
        )
    return np.concatenate(chunks)[:n]


@dataclass(frozen=True)
class EmptinessResult:
    status: str                       # "empty" | "nonempty" | "unknown"
    witness: np.ndarray | None = None


def is_empty(X: BallIntersection, budget: int = 2048, rng: RngSpec | None = None) -> EmptinessResult:
    """Decide emptiness of a ball intersection as far as certificates allow.

    Certified empty: an empty member ball; a pair of balls too far apart;
    or (flat, congruent radii) an exact minimum-enclosing-ball radius above
    the common radius.  Certified nonempty: a concrete member point, tried
    among centers, pairwise deepest points, then ``budget`` uniform draws.
    Anything else is unknown.
    """
    rng = rng if rng is not None else RngSpec(2718)
    if X.trivially_empty:
        return EmptinessResult("empty")
    space = X.space
    balls = X.balls
    n = len(balls)
    centers = np.stack([b.center for b in balls])
    radii = np.array([b.radius for b in balls])
    for i in range(n):
        d_i = distance(space, centers, centers[i])
        if np.any(d_i > radii + radii[i]):
            return EmptinessResult("empty")
    radii_set = {b.radius for b in balls}
    if space.curvature == EUCLIDEAN and len(radii_set) == 1 and n >= 2:
        r = radii[0]
        if meb_euclidean(centers).ball.radius > r + 1e-9:
            return EmptinessResult("empty")

    def deepest(i, j):
        d_ij = float(distance(space, centers[i], centers[j]))
        if d_ij < 1e-15:
            return centers[i]
        u = min(max((d_ij + radii[i] - radii[j]) / 2.0, 0.0), radii[i], d_ij)
        return geodesic_point(space, centers[i], centers[j], u / d_ij)

    candidates = [centers[i] for i in range(n)]
    candidates += [deepest(i, j) for i in range(n) for j in range(i + 1, n)]
    for x in candidates:
        if np.max(X.max_violation(x[None, :])) <= 1e-12:
            return EmptinessResult("nonempty", np.asarray(x))
    if not X.bound.empty and X.bound.radius >= 0:
        pts = sample_uniform_ball(space, X.bound.center, X.bound.radius, rng, n=budget)
        hits = X.member_many(pts)
        if hits.any():
            return EmptinessResult("nonempty", pts[int(np.argmax(hits))])
    return EmptinessResult("unknown")


@dataclass(frozen=True)
class InclusionResult:
    refuted: bool
    witness: np.ndarray | None
    max_excess: float
    samples_used: int


def subset_of_ball(
    K: SetOracle, y, r: float, m: int, rng: RngSpec, tol: float = _REFUTE_TOL
) -> InclusionResult:
    """One-sided test of K being a subset of the ball B[y, r].

    Draws up to m members of K; any member farther than r (beyond tol) from
    y is a certified counterexample.  An unrefuted outcome is statistical
    only.  Starvation in the rejection sampler raises DegenerateSetError.
    """
    y = np.asarray(y, dtype=float)
    pts = sample_members(K, m, rng)
    dists = distance(K.space, pts, y)
    worst = int(np.argmax(dists))
    excess = float(dists[worst] - r)
    if excess > tol:
        return InclusionResult(True, pts[worst], excess, len(pts))
    return InclusionResult(False, None, excess, len(pts))


@dataclass(frozen=True)
class DualMembershipResult:
    inside: bool
    certified: bool
    witness: np.ndarray | None = None


def double_dual_member(
    K, r: float, y, m: int, rng: RngSpec
) -> DualMembershipResult:
    """Membership of y in the r-hull (double dual) of K.

    Accepts K as a UnionOfBalls (its r-dual is then formed exactly) or as
    an already-built BallIntersection representing the r-dual, e.g. from
    dual_of_points.  y lies in the double dual exactly when the dual sits
    inside B[y, r].  An "outside" verdict carries a certified witness (a
    dual point farther than r from y); "inside" is unrefuted only.
    """
    if isinstance(K, UnionOfBalls):
        dual = dual_of_union(K, r)
    elif isinstance(K, BallIntersection):
        dual = K
    else:
        raise ModelError("K must be a UnionOfBalls or the BallIntersection dual")
    if dual.trivially_empty:
        # empty dual: the double dual is the whole space
        return DualMembershipResult(True, True)
    res = subset_of_ball(dual, y, r, m, rng)
    if res.refuted:
        return DualMembershipResult(False, True, res.witness)
    return DualMembershipResult(True, False)
