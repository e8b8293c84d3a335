"""Uniform-contraction volume pipeline.

Two statements get end-to-end statistical treatment here.  First, among
sets of a given volume the geodesic ball maximizes the volume of the
r-dual; verify_dual_volume_maximality hunts for violations over random
unions of balls.  Second, a threshold effect: once the point count clears
a geometry-dependent bound, every uniform contraction of a well-separated
configuration strictly increases the volume of the dual set.  The closed
bound functions sandwich the Monte Carlo estimates, so each verdict comes
with an internal consistency check.

Lengths lam and delta mean: contracted sets have pairwise distances at
most lam, separated sets at least lam, and duals are taken at radius
delta.  The hyperbolic statements carry an extra scale parameter k with
delta < k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .enclosing import relaxed_circumradius_bound
from .geometry import (
    EUCLIDEAN,
    HYPERBOLIC,
    SPHERICAL,
    Ball,
    ModelError,
    Space,
    bisector,
    distance,
    validate_point,
)
from .measure import (
    RngSpec,
    SaturationError,
    VolumeEstimate,
    ball_volume,
    ball_volume_derivative,
    ball_volume_inverse,
    equal_volume_radius,
    estimate_volume,
    sample_uniform_ball,
)
from .oracles import (
    DegenerateSetError,
    UnionOfBalls,
    dual_of_points,
    dual_of_union,
    sample_members,
    subset_of_ball,
    symmetrize,
)

_PACKING_MARGIN = 1.0 + 1e-9   # keeps exact >=lam checks safe in floating point
_EQUALITY_TOL = 1e-12


class PackingError(ModelError):
    """Separated-point generation ran out of room within its retry budget."""


class PreconditionUnmet(ModelError):
    """A merged-radius check was asked outside its stated hypotheses."""


@dataclass(frozen=True)
class ContractionParams:
    """Validated parameter bundle for the uniform-contraction statements.

    The admissible region depends on the geometry:

      flat:        0 < lam <= sqrt(2) delta
      spherical:   0 < delta < pi/2,  0 < lam < min{(2 sqrt 2/pi) delta, pi - 2 delta}
      hyperbolic:  0 < (sinh k / (sqrt 2 k)) lam <= delta < k

    For hyperbolic space a missing k defaults to max(1.0001 delta, 1) and is
    then validated like an explicit one.
    """

    space: Space
    n_points: int
    lam: float
    delta: float
    k: float | None = None

    def __post_init__(self):
        if self.n_points < 1:
            raise ModelError(f"need at least one point, got {self.n_points}")
        if self.lam <= 0 or self.delta <= 0:
            raise ModelError("lam and delta must be positive")
        kappa = self.space.curvature
        if kappa != HYPERBOLIC:
            if self.k is not None:
                raise ModelError("scale parameter k applies to hyperbolic space only")
            if kappa == EUCLIDEAN and not self.lam <= math.sqrt(2.0) * self.delta:
                raise ModelError(
                    f"flat hypothesis lam <= sqrt(2) delta fails: {self.lam} > "
                    f"{math.sqrt(2.0) * self.delta}"
                )
            if kappa == SPHERICAL:
                if not self.delta < math.pi / 2.0:
                    raise ModelError(f"spherical hypothesis needs delta < pi/2, got {self.delta}")
                cap = min(2.0 * math.sqrt(2.0) / math.pi * self.delta, math.pi - 2.0 * self.delta)
                if not self.lam < cap:
                    raise ModelError(f"spherical hypothesis needs lam < {cap}, got {self.lam}")
            return
        k = self.k if self.k is not None else max(self.delta * 1.0001, 1.0)
        object.__setattr__(self, "k", k)
        if not self.delta < k:
            raise ModelError(f"hyperbolic hypothesis needs delta < k, got delta={self.delta}, k={k}")
        stretched = math.sinh(k) / (math.sqrt(2.0) * k) * self.lam
        if not 0.0 < stretched <= self.delta:
            raise ModelError(
                f"hyperbolic hypothesis (sinh k/(sqrt 2 k)) lam <= delta fails: "
                f"{stretched} > {self.delta}"
            )


def threshold_point_count(p: ContractionParams) -> int:
    """Smallest point count at which the contraction statement is claimed."""
    d = p.space.dim
    if p.space.curvature == EUCLIDEAN:
        return math.ceil((1.0 + math.sqrt(2.0)) ** d)
    if p.space.curvature == SPHERICAL:
        return math.ceil(
            2.0 * math.e * d * math.pi ** (d - 1)
            * (0.5 + math.pi / (2.0 * math.sqrt(2.0))) ** d
        )
    k = p.k
    return math.ceil(
        (math.sinh(2.0 * k) / (2.0 * k)) ** (d - 1)
        * (math.sqrt(2.0) * math.sinh(k) / k + 1.0) ** d
    )


def contracted_lower_bound(p: ContractionParams) -> float:
    """Volume floor for the delta-dual of any set of diameter <= lam.

    The set sits in a ball whose radius is the relaxed circumradius bound,
    so its dual contains the concentric ball of radius delta minus that.
    """
    inner = p.delta - relaxed_circumradius_bound(p.space, p.lam, p.k)
    if inner < 0.0:
        raise ModelError("hypotheses violated: contracted dual radius is negative")
    return ball_volume(p.space, inner)


def separated_upper_bound(p: ContractionParams) -> float:
    """Volume ceiling for the delta-dual of any lam-separated n-point set.

    Packing lam/2-balls around the points forces the set to spread, which
    shrinks the dual; a negative derived radius means the bound is the
    empty set, value 0.
    """
    d = p.space.dim
    root = p.n_points ** (1.0 / d)
    if p.space.curvature == EUCLIDEAN:
        inner = p.delta - (root - 1.0) / 2.0 * p.lam
    elif p.space.curvature == SPHERICAL:
        coeff = (1.0 / (2.0 * math.e * d * math.pi ** (d - 1))) ** (1.0 / d)
        inner = p.delta - (coeff * root - 0.5) * p.lam
    else:
        coeff = (2.0 * p.k / math.sinh(2.0 * p.k)) ** ((d - 1.0) / d)
        inner = p.delta - (coeff * root - 1.0) * (p.lam / 2.0)
    if inner <= 0.0:
        return 0.0
    if p.space.curvature == SPHERICAL:
        inner = min(inner, math.pi)
    return ball_volume(p.space, inner)


def check_merged_radius_spherical(d: int, n: int, lam: float) -> bool:
    """Spherical packing-scale inequality behind the separated bound.

    mu is the radius of the single cap holding the volume of n caps of
    radius lam/2; the claim is (1/(2 e d pi^{d-1}))^{1/d} n^{1/d} lam < mu
    whenever mu < pi/2.
    """
    space = Space.spherical(d)
    try:
        mu = equal_volume_radius(space, n, lam)
    except SaturationError as exc:
        raise PreconditionUnmet(f"merged cap saturates the sphere: {exc}") from exc
    if not mu < math.pi / 2.0:
        raise PreconditionUnmet(f"merged radius {mu} is not below pi/2")
    lhs = (1.0 / (2.0 * math.e * d * math.pi ** (d - 1))) ** (1.0 / d) * n ** (1.0 / d) * lam
    return lhs < mu


def check_merged_radius_hyperbolic(d: int, k: float, n: int, lam: float, delta: float) -> bool:
    """Hyperbolic counterpart: (2k/sinh 2k)^{(d-1)/d} n^{1/d} lam/2 < mu
    whenever mu <= delta + lam/2."""
    if k <= 0:
        raise ModelError(f"k must be positive, got {k}")
    space = Space.hyperbolic(d)
    mu = equal_volume_radius(space, n, lam)
    if not mu <= delta + lam / 2.0:
        raise PreconditionUnmet(
            f"merged radius {mu} exceeds delta + lam/2 = {delta + lam / 2.0}"
        )
    lhs = (2.0 * k / math.sinh(2.0 * k)) ** ((d - 1.0) / d) * n ** (1.0 / d) * (lam / 2.0)
    return lhs < mu


def _pairwise_distances(space: Space, pts: np.ndarray) -> np.ndarray:
    n = len(pts)
    out = []
    for i in range(n - 1):
        out.append(distance(space, pts[i + 1 :], pts[i]))
    return np.concatenate(out) if out else np.zeros(0)


def sample_contracted_points(p: ContractionParams, rng: RngSpec) -> np.ndarray:
    """n points uniform in the ball of radius lam/2 around the origin, so
    all pairwise distances stay below lam with floating-point room."""
    pts = sample_uniform_ball(
        p.space, p.space.origin(), p.lam / 2.0 / _PACKING_MARGIN, rng, n=p.n_points
    )
    gaps = _pairwise_distances(p.space, pts)
    if gaps.size and float(gaps.max()) > p.lam:
        raise ModelError("contracted sample failed its own diameter check")
    return pts


def _hex_patch(n: int, spacing: float) -> np.ndarray:
    side = math.ceil(math.sqrt(n)) + 2
    pts = []
    for j in range(-side, side + 1):
        for i in range(-side, side + 1):
            pts.append((spacing * (i + 0.5 * (j & 1)), spacing * j * math.sqrt(3.0) / 2.0))
    pts = np.asarray(pts)
    order = np.argsort(np.linalg.norm(pts, axis=1), kind="stable")
    return pts[order[:n]]


def sample_separated_points(p: ContractionParams, rng: RngSpec) -> np.ndarray:
    """n points with pairwise distances >= lam.

    Flat 2D uses a hexagonal patch around the origin (deterministic, tight).
    Everything else is greedy rejection inside a ball that expands whenever
    the packing stalls; exhausting the retry budget raises PackingError.
    """
    if p.space.curvature == EUCLIDEAN and p.space.dim == 2:
        pts = _hex_patch(p.n_points, p.lam * _PACKING_MARGIN)
    else:
        gen = rng.generator()
        radius = p.lam * max(1.0, p.n_points ** (1.0 / p.space.dim) / 2.0)
        placed: list[np.ndarray] = []
        block = 256
        for round_ in range(24):
            radius = min(radius, p.space.max_radius() * 0.999)
            budget = max(2, 400 * p.n_points // block)
            for attempt in range(budget):
                cands = sample_uniform_ball(
                    p.space, p.space.origin(), radius, gen, n=block
                )
                for cand in cands:
                    if placed:
                        gaps = distance(p.space, np.asarray(placed), cand)
                        if float(np.min(gaps)) < p.lam * _PACKING_MARGIN:
                            continue
                    placed.append(cand)
                    if len(placed) == p.n_points:
                        break
                if len(placed) == p.n_points:
                    break
            if len(placed) == p.n_points:
                break
            radius *= 1.4
        else:
            raise PackingError(
                f"could not place {p.n_points} points at separation {p.lam}"
            )
        pts = np.asarray(placed)
    gaps = _pairwise_distances(p.space, np.atleast_2d(pts))
    if gaps.size and float(gaps.min()) < p.lam:
        raise PackingError("separated sample failed its own spacing check")
    return pts


@dataclass(frozen=True)
class ContractionReport:
    """Outcome of one separated-vs-contracted dual volume comparison."""

    params: ContractionParams
    threshold: int
    f_lower: float
    g_upper: float
    vol_separated_dual: VolumeEstimate
    vol_contracted_dual: VolumeEstimate
    verdict: str
    sandwich_ok: bool
    degenerate_contraction: bool
    provenance: dict = field(default_factory=dict)


def verify_contraction_instance(
    p: ContractionParams, separated, contracted, n_mc: int, rng: RngSpec
) -> ContractionReport:
    """Monte Carlo comparison of the two delta-dual volumes.

    The verdict is "verified" only when the 3-sigma confidence intervals
    separate in the predicted direction (separated dual strictly smaller);
    overlap is "inconclusive", separation the wrong way "violated".  A
    degenerate contraction (every distance exactly lam, so the two sets are
    congruent) is never allowed to verify.
    """
    separated = np.atleast_2d(np.asarray(separated, dtype=float))
    contracted = np.atleast_2d(np.asarray(contracted, dtype=float))
    for x in separated:
        validate_point(p.space, x)
    for x in contracted:
        validate_point(p.space, x)
    if len(separated) != p.n_points or len(contracted) != p.n_points:
        raise ModelError(
            f"expected {p.n_points} points, got {len(separated)} and {len(contracted)}"
        )
    sep_gaps = _pairwise_distances(p.space, separated)
    con_gaps = _pairwise_distances(p.space, contracted)
    min_sep = float(sep_gaps.min()) if sep_gaps.size else math.inf
    max_con = float(con_gaps.max()) if con_gaps.size else 0.0
    if min_sep < p.lam or max_con > p.lam:
        raise ModelError(
            f"not a uniform contraction at {p.lam}: separations reach down to "
            f"{min_sep}, contracted distances up to {max_con}"
        )
    degenerate = max_con >= min_sep - _EQUALITY_TOL

    dual_sep = dual_of_points(p.space, separated, p.delta)
    dual_con = dual_of_points(p.space, contracted, p.delta)
    est_sep = estimate_volume(dual_sep, dual_sep.bound, n_mc, rng.child(0))
    est_con = estimate_volume(dual_con, dual_con.bound, n_mc, rng.child(1))

    f_low = contracted_lower_bound(p)
    g_up = separated_upper_bound(p)
    if est_sep.value + 3.0 * est_sep.std_err < est_con.value - 3.0 * est_con.std_err:
        verdict = "verified" if not degenerate else "inconclusive"
    elif est_sep.value - 3.0 * est_sep.std_err > est_con.value + 3.0 * est_con.std_err:
        verdict = "violated"
    else:
        verdict = "inconclusive"
    sandwich = (
        est_sep.value <= g_up + 3.0 * est_sep.std_err
        and est_con.value >= f_low - 3.0 * est_con.std_err
    )
    return ContractionReport(
        params=p,
        threshold=threshold_point_count(p),
        f_lower=f_low,
        g_upper=g_up,
        vol_separated_dual=est_sep,
        vol_contracted_dual=est_con,
        verdict=verdict,
        sandwich_ok=sandwich,
        degenerate_contraction=degenerate,
        provenance={
            "space": p.space.name,
            "dim": p.space.dim,
            "n_points": p.n_points,
            "lam": p.lam,
            "delta": p.delta,
            "k": p.k,
            "n_mc": n_mc,
            "seed": rng.seed,
            "stream_id": rng.stream_id,
            "min_separation": min_sep,
            "max_contracted": max_con,
        },
    )


@dataclass(frozen=True)
class MaximalityTrial:
    n_balls: int
    volume_a: float
    volume_a_err: float
    eq_radius: float
    dual_volume: float
    dual_err: float
    ball_dual_volume: float
    combined_sigma: float
    excess: float
    flagged: bool


@dataclass(frozen=True)
class MaximalityReport:
    space: str
    dim: int
    r: float
    trials: int
    n_mc: int
    seed: int
    violations: int
    worst_margin: float
    records: tuple


def verify_dual_volume_maximality(
    space: Space, r: float, trials: int, n_mc: int, rng: RngSpec
) -> MaximalityReport:
    """Random search for violations of "the ball maximizes dual volume".

    Each trial draws a union A of 1-5 balls, estimates its volume, forms
    the ball B of equal volume, and compares the Monte Carlo volume of the
    r-dual of A against the closed-form volume of the r-dual of B.  A trial
    is flagged only when the dual of A comes out larger by more than three
    combined standard errors, where the equal-volume radius uncertainty is
    propagated first-order through the volume derivative.
    """
    space.check_dual_radius(r)
    records = []
    violations = 0
    worst = -math.inf
    for t in range(trials):
        branch = rng.child(t)
        gen = branch.child(0).generator()
        n_balls = int(gen.integers(1, 6))
        centers = sample_uniform_ball(
            space, space.origin(), 0.8 * r, branch.child(1), n=n_balls
        )
        radii = gen.uniform(0.1 * r, 0.4 * r, size=n_balls)
        union = UnionOfBalls(
            space, [Ball(c, float(s)) for c, s in zip(centers, radii)]
        )
        est_a = estimate_volume(union, union.bound, n_mc, branch.child(2))
        eq_rad = ball_volume_inverse(space, est_a.value)
        dual = dual_of_union(union, r, allow_mixed=True)
        est_dual = estimate_volume(dual, dual.bound, n_mc, branch.child(3))

        inner = r - eq_rad
        v_ball = ball_volume(space, inner) if inner > 0.0 else 0.0
        slope_a = ball_volume_derivative(space, eq_rad)
        slope_b = ball_volume_derivative(space, inner) if inner > 0.0 else 0.0
        sigma_ball = est_a.std_err * slope_b / slope_a if slope_a > 0.0 else 0.0
        combined = math.hypot(est_dual.std_err, sigma_ball)
        excess = est_dual.value - v_ball
        # both estimates can be exact (sampling ball == set, zero misses);
        # the absolute floor absorbs float rounding in that regime
        flagged = excess > 3.0 * combined + 1e-12
        worst = max(worst, excess - 3.0 * combined)
        violations += int(flagged)
        records.append(
            MaximalityTrial(
                n_balls, est_a.value, est_a.std_err, eq_rad,
                est_dual.value, est_dual.std_err, v_ball, combined,
                excess, flagged,
            )
        )
    return MaximalityReport(
        space.name, space.dim, r, trials, n_mc, rng.seed,
        violations, worst, tuple(records),
    )


@dataclass(frozen=True)
class SymmetrizationReport:
    space: str
    dim: int
    r: float
    trials: int
    boundary_samples: int
    inner_samples: int
    seed: int
    refutations: int
    samples_checked: int
    worst_excess: float


def verify_symmetrization_inclusion(
    space: Space,
    r: float,
    trials: int,
    n_boundary: int = 100,
    n_inner: int = 1000,
    rng: RngSpec | None = None,
) -> SymmetrizationReport:
    """Refutation search for the symmetrized-dual inclusion.

    For random K (union of balls) and a random mirror H, every point of
    the symmetrization of the r-dual of K must stay within r of all of the
    symmetrization of K.  Each sampled point either survives or yields a
    certified counterexample pair; the expected refutation count is zero.
    """
    space.check_dual_radius(r)
    if rng is None:
        rng = RngSpec(31415)
    refutations = 0
    checked = 0
    worst = -math.inf
    c_max = min(0.3, 0.5 * r)
    s_max = min(0.15, 0.25 * r)
    for t in range(trials):
        branch = rng.child(t)
        gen = branch.child(0).generator()
        n_balls = int(gen.integers(1, 5))
        centers = sample_uniform_ball(
            space, space.origin(), c_max, branch.child(1), n=n_balls
        )
        s = float(gen.uniform(0.05, s_max)) if s_max > 0.05 else 0.5 * s_max
        union = UnionOfBalls(space, [Ball(c, s) for c in centers])

        a, b = sample_uniform_ball(space, space.origin(), 0.5, branch.child(2), n=2)
        if distance(space, a, b) < 1e-6:
            continue
        plane = bisector(space, a, b)

        dual = dual_of_union(union, r)
        sym_dual = symmetrize(dual, plane)
        sym_union = symmetrize(union, plane)
        try:
            ys = sample_members(sym_dual, n_boundary, branch.child(3))
        except DegenerateSetError:
            continue
        for j, y in enumerate(ys):
            res = subset_of_ball(sym_union, y, r, n_inner, branch.child(4).child(j))
            checked += 1
            worst = max(worst, res.max_excess)
            refutations += int(res.refuted)
    return SymmetrizationReport(
        space.name, space.dim, r, trials, n_boundary, n_inner,
        rng.seed, refutations, checked, worst,
    )
