"""Ball volumes (quadrature and inverse), uniform sampling in geodesic balls,
and hit-or-miss Monte Carlo volume estimation.

The volume of a geodesic ball of radius r is

    kappa = 0:   omega_d r^d
    kappa = +1:  d omega_d integral_0^r sin(t)^(d-1) dt
    kappa = -1:  d omega_d integral_0^r sinh(t)^(d-1) dt

with omega_d the Euclidean unit-ball volume.  The same radial integrand
drives the inverse solver and the radial inverse-CDF sampler.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from .geometry import (
    EUCLIDEAN,
    HYPERBOLIC,
    SPHERICAL,
    Ball,
    ModelError,
    Space,
    distance,
    transport_from_origin,
)

_Z95 = 1.959963984540054          # two-sided 95% normal quantile
_BLOCK = 32768                    # fixed MC block size; determinism unit
_TABLE_POINTS = 8193              # radial CDF table resolution


class SaturationError(ModelError):
    """A spherical volume request exceeds the total volume of the sphere."""


@dataclass(frozen=True)
class RngSpec:
    """Splittable random stream handle.

    Identical (seed, stream_id) always reproduce identical draws.  ``child``
    derives an independent substream for a numbered work unit; substreams are
    stable across process and thread layouts, which is what makes blocked
    Monte Carlo merge-order independent.
    """

    seed: int
    stream_id: int = 0
    path: tuple = ()

    def __post_init__(self):
        if self.seed < 0 or self.stream_id < 0:
            raise ModelError("seed and stream_id must be nonnegative")

    def child(self, index: int) -> "RngSpec":
        return RngSpec(self.seed, self.stream_id, self.path + (int(index),))

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,) + self.path)
        return np.random.Generator(np.random.Philox(seq))


@dataclass(frozen=True)
class VolumeEstimate:
    """Hit-or-miss Monte Carlo volume with its uncertainty."""

    value: float
    n_samples: int
    std_err: float
    ci95: tuple
    sampling_ball_volume: float
    hits: int = 0

    @property
    def lo(self) -> float:
        return self.ci95[0]

    @property
    def hi(self) -> float:
        return self.ci95[1]


def unit_ball_volume(d: int) -> float:
    """Volume of the Euclidean unit ball, pi^(d/2) / Gamma(d/2 + 1)."""
    if d < 1:
        raise ModelError(f"dimension must be >= 1, got {d}")
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


def _radial_profile(curvature: int, d: int, t):
    if curvature == SPHERICAL:
        return np.sin(t) ** (d - 1)
    if curvature == HYPERBOLIC:
        return np.sinh(t) ** (d - 1)
    return np.asarray(t, dtype=float) ** (d - 1)


@lru_cache(maxsize=4096)
def _ball_volume_scalar(curvature: int, d: int, r: float) -> float:
    if curvature == EUCLIDEAN:
        return unit_ball_volume(d) * r**d
    if r == 0.0:
        return 0.0
    integral, _ = integrate.quad(
        lambda t: _radial_profile(curvature, d, t), 0.0, r, epsabs=0.0, epsrel=1e-12, limit=200
    )
    return d * unit_ball_volume(d) * integral


def ball_volume(space: Space, r: float) -> float:
    """Volume of a closed geodesic ball of radius r (quadrature for curved)."""
    if r < 0:
        raise ModelError(f"ball radius must be nonnegative, got {r}")
    if space.curvature == SPHERICAL and r > math.pi + 1e-12:
        raise ModelError(f"spherical ball radius {r} exceeds pi")
    return _ball_volume_scalar(space.curvature, space.dim, float(min(r, math.pi) if space.curvature == SPHERICAL else r))


def volume_of(space: Space, ball: Ball) -> float:
    """Ball volume honoring the empty-ball convention (volume 0)."""
    return 0.0 if ball.empty else ball_volume(space, ball.radius)


def ball_volume_derivative(space: Space, r: float) -> float:
    """d/dr of ball_volume: the area of the geodesic sphere of radius r."""
    return space.dim * unit_ball_volume(space.dim) * float(
        _radial_profile(space.curvature, space.dim, r)
    )


def ball_volume_inverse(space: Space, v: float) -> float:
    """Radius r with ball_volume(space, r) = v, to relative 1e-9.

    Bracketed bisection on the monotone volume function down to a 1e-12
    bracket, then a short Newton polish with the analytic derivative.
    """
    if v <= 0:
        raise ModelError(f"volume must be positive, got {v}")
    if space.curvature == EUCLIDEAN:
        return (v / unit_ball_volume(space.dim)) ** (1.0 / space.dim)
    if space.curvature == SPHERICAL:
        total = ball_volume(space, math.pi)
        if v > total * (1.0 + 1e-12):
            raise SaturationError(
                f"requested volume {v} exceeds the total sphere volume {total}"
            )
        if v >= total:
            return math.pi
        lo, hi = 0.0, math.pi
    else:
        lo, hi = 0.0, 1.0
        while ball_volume(space, hi) < v:
            hi *= 2.0
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if ball_volume(space, mid) < v:
            lo = mid
        else:
            hi = mid
    r = 0.5 * (lo + hi)
    for _ in range(3):
        deriv = ball_volume_derivative(space, r)
        if deriv <= 0.0:
            break
        step = (ball_volume(space, r) - v) / deriv
        candidate = r - step
        if not (lo - 1e-9 <= candidate <= hi + 1e-9):
            break
        r = candidate
    return r


def equal_volume_radius(space: Space, n: int, lam: float) -> float:
    """Radius of the single ball whose volume equals n balls of radius lam/2.

    Closed form (n^(1/d) lam / 2) when flat; volume-inverse solve otherwise.
    Raises SaturationError when the requested volume does not fit on the
    sphere.
    """
    if n < 1:
        raise ModelError(f"need n >= 1 balls, got {n}")
    if lam <= 0:
        raise ModelError(f"lam must be positive, got {lam}")
    if space.curvature == SPHERICAL and lam / 2 > math.pi:
        raise ModelError(f"lam/2 = {lam / 2} exceeds pi")
    if n == 1:
        return lam / 2
    if space.curvature == EUCLIDEAN:
        return 0.5 * n ** (1.0 / space.dim) * lam
    return ball_volume_inverse(space, n * ball_volume(space, lam / 2))


# ------------------------------------------------------------------ sampling


@lru_cache(maxsize=64)
def _radial_cdf_table(curvature: int, d: int, t_max: float):
    grid = np.linspace(0.0, t_max, _TABLE_POINTS)
    weight = _radial_profile(curvature, d, grid)
    cum = integrate.cumulative_trapezoid(weight, grid, initial=0.0)
    return grid, cum


def _sample_radii(space: Space, r: float, u: np.ndarray) -> np.ndarray:
    """Radii with density proportional to the radial profile on [0, r]."""
    if space.curvature == EUCLIDEAN:
        return r * u ** (1.0 / space.dim)
    if space.curvature == SPHERICAL:
        t_max = math.pi
    else:
        t_max = 4.0
        while t_max < r:
            t_max *= 2.0
    grid, cum = _radial_cdf_table(space.curvature, space.dim, t_max)
    total = np.interp(r, grid, cum)
    return np.interp(u * total, cum, grid)


def _sample_ball_block(
    space: Space, center: np.ndarray, r: float, gen: np.random.Generator, n: int
) -> np.ndarray:
    d = space.dim
    v = gen.standard_normal((n, d))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    t = _sample_radii(space, r, gen.random(n))
    if space.curvature == EUCLIDEAN:
        return center + v * t[:, None]
    if space.curvature == SPHERICAL:
        pts = np.concatenate([np.sin(t)[:, None] * v, np.cos(t)[:, None]], axis=1)
    else:
        pts = np.concatenate([np.sinh(t)[:, None] * v, np.cosh(t)[:, None]], axis=1)
    return pts @ transport_from_origin(space, center).T


def sample_uniform_ball(space: Space, center, r: float, rng, n: int | None = None):
    """Uniform sample(s) from the geodesic ball B[center, r].

    Direction uniform in the tangent space at the center, radius by inverse
    CDF of the radial volume density, then the exponential map.  ``rng`` is an
    RngSpec or a numpy Generator.  Returns one point, or an (n, embed_dim)
    array when n is given.
    """
    if r < 0:
        raise ModelError(f"sampling radius must be nonnegative, got {r}")
    gen = rng.generator() if isinstance(rng, RngSpec) else rng
    c = np.asarray(center, dtype=float)
    pts = _sample_ball_block(space, c, float(r), gen, 1 if n is None else int(n))
    return pts[0] if n is None else pts


# ----------------------------------------------------------- MC estimation


def _worker_count() -> int:
    raw = os.environ.get("CURVBALL_THREADS", "").strip()
    if not raw:
        return 1
    return max(1, int(raw))


def _membership(oracle, pts: np.ndarray) -> np.ndarray:
    many = getattr(oracle, "member_many", None)
    if many is not None:
        return np.asarray(many(pts), dtype=bool)
    return np.fromiter((bool(oracle.member(p)) for p in pts), dtype=bool, count=len(pts))


def estimate_volume(oracle, sampling_ball: Ball, n: int, rng: RngSpec) -> VolumeEstimate:
    """Hit-or-miss volume of an oracle set inside a caller-certified ball.

    The oracle must expose ``space``, ``member``/``member_many``, and a
    ``bound`` ball that contains the set; the caller guarantees bound is
    inside sampling_ball.  A hit observed outside the declared bound is a
    hard error (the certificate was wrong).  Work is split into fixed-size
    blocks, one child stream per block, and hit counts are accumulated as
    integers, so the result is independent of thread count and merge order.
    """
    if n < 1:
        raise ModelError(f"need at least one sample, got {n}")
    if sampling_ball.empty:
        raise ModelError("cannot sample from an empty ball")
    space = oracle.space
    vol_sampling = ball_volume(space, sampling_ball.radius)
    center = np.asarray(sampling_ball.center, dtype=float)
    bound = oracle.bound
    n = int(n)
    n_blocks = (n + _BLOCK - 1) // _BLOCK

    def run_block(i: int) -> int:
        size = min(_BLOCK, n - i * _BLOCK)
        gen = rng.child(i).generator()
        pts = _sample_ball_block(space, center, sampling_ball.radius, gen, size)
        inside = _membership(oracle, pts)
        if inside.any():
            if bound.empty:
                raise ModelError("oracle declared an empty bound but produced a hit")
            stray = inside & (
                distance(space, pts, bound.center) > bound.radius + 1e-9
            )
            if stray.any():
                raise ModelError(
                    "oracle hit outside its declared bounding ball; "
                    "the bound certificate is wrong"
                )
        return int(np.count_nonzero(inside))

    workers = _worker_count()
    if workers > 1 and n_blocks > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            hits = sum(pool.map(run_block, range(n_blocks)))
    else:
        hits = sum(run_block(i) for i in range(n_blocks))

    p = hits / n
    value = vol_sampling * p
    std_err = vol_sampling * math.sqrt(p * (1.0 - p) / n)
    ci = (value - _Z95 * std_err, value + _Z95 * std_err)
    return VolumeEstimate(value, n, std_err, ci, vol_sampling, hits)
