"""Points, distances, geodesics, hyperplanes, and reflections in the three
constant-curvature model spaces.

Conventions:
  * curvature 0  -> flat coordinates in R^d
  * curvature +1 -> unit-sphere embedding in R^(d+1)
  * curvature -1 -> upper hyperboloid sheet in R^(d+1) with the Lorentz form
                    <x,y> = x_1 y_1 + ... + x_d y_d - x_{d+1} y_{d+1}

Every operation is pure; all types are immutable.  Distance, membership,
side, and reflection accept either a single coordinate vector or an
(n, embed_dim) batch and vectorize over the batch; geodesic_point and
bisector take single points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

EUCLIDEAN = 0
SPHERICAL = 1
HYPERBOLIC = -1

MEMBERSHIP_TOL = 1e-9   # model-membership tolerance
SIDE_TOL = 1e-12        # dead band for the hyperplane side test

_SPACE_NAMES = {EUCLIDEAN: "euclidean", SPHERICAL: "spherical", HYPERBOLIC: "hyperbolic"}


class ModelError(ValueError):
    """An input violates a model invariant (off-manifold point, bad radius...)."""


class DegenerateGeodesicError(ValueError):
    """The geodesic between the given endpoints is not unique."""


@dataclass(frozen=True)
class Space:
    """Ambient geometry: curvature in {-1, 0, +1} plus dimension d >= 2.

    ``k_cap`` is the working-scale parameter of the hyperbolic contraction
    setting; it is carried here only so hyperbolic parameter sets can travel
    with their space.
    """

    curvature: int
    dim: int
    k_cap: float | None = None

    def __post_init__(self):
        if self.curvature not in (-1, 0, 1):
            raise ModelError(f"curvature must be -1, 0, or +1, got {self.curvature}")
        if self.dim < 2:
            raise ModelError(f"dimension must be >= 2, got {self.dim}")
        if self.k_cap is not None:
            if self.curvature != HYPERBOLIC:
                raise ModelError("k_cap is only meaningful for curvature -1")
            if self.k_cap <= 0:
                raise ModelError("k_cap must be positive")

    @classmethod
    def euclidean(cls, dim: int) -> "Space":
        return cls(EUCLIDEAN, dim)

    @classmethod
    def spherical(cls, dim: int) -> "Space":
        return cls(SPHERICAL, dim)

    @classmethod
    def hyperbolic(cls, dim: int, k_cap: float | None = None) -> "Space":
        return cls(HYPERBOLIC, dim, k_cap)

    @property
    def name(self) -> str:
        return _SPACE_NAMES[self.curvature]

    @property
    def embed_dim(self) -> int:
        """Length of a coordinate vector in this space's model."""
        return self.dim if self.curvature == EUCLIDEAN else self.dim + 1

    def origin(self) -> np.ndarray:
        """Base point: 0 in E^d, the last unit vector for the curved models."""
        o = np.zeros(self.embed_dim)
        if self.curvature != EUCLIDEAN:
            o[-1] = 1.0
        return o

    def max_radius(self) -> float:
        """Largest admissible ball radius (pi on the sphere, inf otherwise)."""
        return math.pi if self.curvature == SPHERICAL else math.inf

    def check_dual_radius(self, r: float) -> float:
        """Admissible dual radius: (0, inf) for curvature <= 0, (0, pi/2] for +1."""
        if r <= 0:
            raise ModelError(f"dual radius must be positive, got {r}")
        if self.curvature == SPHERICAL and r > math.pi / 2 + 1e-12:
            raise ModelError(f"spherical dual radius must be <= pi/2, got {r}")
        return float(r)


def space_from_name(name: str, dim: int, k_cap: float | None = None) -> Space:
    for curv, n in _SPACE_NAMES.items():
        if n == name:
            return Space(curv, dim, k_cap if curv == HYPERBOLIC else None)
    raise ModelError(f"unknown space {name!r}; expected one of {sorted(_SPACE_NAMES.values())}")


def lorentz_dot(x: np.ndarray, y: np.ndarray) -> np.ndarray | float:
    """Lorentz bilinear form with signature (+, ..., +, -)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = np.sum(x[..., :-1] * y[..., :-1], axis=-1) - x[..., -1] * y[..., -1]
    return float(out) if out.ndim == 0 else out


def _form_dot(space: Space, x, y):
    if space.curvature == HYPERBOLIC:
        return lorentz_dot(x, y)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = np.sum(x * y, axis=-1)
    return float(out) if out.ndim == 0 else out


def on_manifold(space: Space, x, tol: float = MEMBERSHIP_TOL):
    """Whether the coordinates satisfy the model constraint within tol."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != space.embed_dim:
        return np.zeros(x.shape[:-1], dtype=bool) if x.ndim > 1 else False
    if space.curvature == EUCLIDEAN:
        ok = np.isfinite(x).all(axis=-1)
    elif space.curvature == SPHERICAL:
        ok = np.abs(np.sum(x * x, axis=-1) - 1.0) <= tol
    else:
        ok = (np.abs(lorentz_dot(x, x) + 1.0) <= tol) & (x[..., -1] > 0)
    return bool(ok) if np.ndim(ok) == 0 else ok


def validate_point(space: Space, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != space.embed_dim:
        raise ModelError(
            f"point has {x.shape[-1]} coordinates, {space.name} d={space.dim} needs {space.embed_dim}"
        )
    if not np.all(on_manifold(space, x)):
        raise ModelError(f"coordinates do not satisfy the {space.name} model invariant")
    return x


def project(space: Space, x) -> np.ndarray:
    """Renormalize coordinates onto the model surface (identity for E^d)."""
    x = np.asarray(x, dtype=float)
    if space.curvature == EUCLIDEAN:
        return x
    if space.curvature == SPHERICAL:
        return x / np.linalg.norm(x, axis=-1, keepdims=True)
    q = -lorentz_dot(x, x)
    return x / np.sqrt(np.expand_dims(q, -1) if np.ndim(q) else q)


def distance(space: Space, x, y):
    """Geodesic distance; accepts batches and broadcasts."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if space.curvature == EUCLIDEAN:
        out = np.linalg.norm(x - y, axis=-1)
    elif space.curvature == SPHERICAL:
        out = np.arccos(np.clip(np.sum(x * y, axis=-1), -1.0, 1.0))
    else:
        out = np.arccosh(np.maximum(-lorentz_dot(x, y), 1.0))
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class OrientedHyperplane:
    """Totally geodesic hyperplane with an orientation.

    curvature 0:  {x : <x, normal> = offset}, unit Euclidean normal.
    curvature +1: {x : <x, normal> = 0}, unit normal in R^(d+1).
    curvature -1: {x : <x, normal>_L = 0}, spacelike Lorentz-unit normal.
    The + side is where the (offset-shifted) form value is >= 0.
    """

    normal: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "normal", np.asarray(self.normal, dtype=float))


def _plane_value(space: Space, plane: OrientedHyperplane, x):
    if space.curvature == EUCLIDEAN:
        v = np.sum(np.asarray(x, dtype=float) * plane.normal, axis=-1) - plane.offset
    else:
        v = _form_dot(space, x, plane.normal)
    return v


def side(space: Space, plane: OrientedHyperplane, x):
    """-1, 0, or +1; zero inside a 1e-12 dead band around the hyperplane."""
    v = _plane_value(space, plane, x)
    s = np.where(np.abs(v) <= SIDE_TOL, 0, np.sign(v)).astype(int)
    return int(s) if np.ndim(s) == 0 else s


def reflect(space: Space, plane: OrientedHyperplane, x) -> np.ndarray:
    """Reflection about the hyperplane: a Householder map in the model's form."""
    x = np.asarray(x, dtype=float)
    v = _plane_value(space, plane, x)
    v = np.expand_dims(v, -1) if np.ndim(v) else v
    out = x - 2.0 * v * plane.normal
    if space.curvature == EUCLIDEAN:
        return out
    return project(space, out)


def geodesic_point(space: Space, x, y, t: float) -> np.ndarray:
    """Point at parameter t in [0, 1] along the geodesic from x to y."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if space.curvature == EUCLIDEAN:
        return x + t * (y - x)
    theta = distance(space, x, y)
    if space.curvature == SPHERICAL and theta >= math.pi - 1e-9:
        raise DegenerateGeodesicError("antipodal endpoints: geodesic is not unique")
    if theta < 1e-14:
        return project(space, x)
    if space.curvature == SPHERICAL:
        w = (math.sin((1.0 - t) * theta) * x + math.sin(t * theta) * y) / math.sin(theta)
    else:
        w = (math.sinh((1.0 - t) * theta) * x + math.sinh(t * theta) * y) / math.sinh(theta)
    return project(space, w)


def bisector(space: Space, a, b) -> OrientedHyperplane:
    """Perpendicular bisector of a and b, oriented with b on the + side.

    Reflecting about the result exchanges a and b.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    diff = b - a
    if space.curvature == HYPERBOLIC:
        q = lorentz_dot(diff, diff)
    else:
        q = float(np.dot(diff, diff))
    if q <= 1e-24:
        raise ModelError("bisector of two identical points is undefined")
    n = diff / math.sqrt(q)
    if space.curvature == EUCLIDEAN:
        mid = 0.5 * (a + b)
        return OrientedHyperplane(n, float(np.dot(mid, n)))
    return OrientedHyperplane(n)


def transport_from_origin(space: Space, c) -> np.ndarray:
    """Isometry of the embedding taking the model origin to c.

    Sphere: rotation in the plane spanned by the origin and c.  Hyperboloid:
    Lorentz boost along the geodesic from the origin to c.  Columns map the
    origin's tangent basis to a tangent frame at c, so the matrix pushes
    samples built around the origin to samples around c.
    """
    if space.curvature == EUCLIDEAN:
        raise ModelError("transport matrix only applies to the curved models")
    c = validate_point(space, np.asarray(c, dtype=float))
    d = space.dim
    w = c[:d]
    nw = np.linalg.norm(w)
    eye = np.eye(d + 1)
    if nw < 1e-15:
        if space.curvature == HYPERBOLIC or c[-1] > 0:
            return eye
        # antipode of the spherical origin: rotate by pi in the (e_1, e_{d+1}) plane
        w_hat = np.zeros(d)
        w_hat[0] = 1.0
        s, cs = 0.0, -1.0
    else:
        w_hat = w / nw
        if space.curvature == SPHERICAL:
            s, cs = nw, c[-1]
        else:
            s, cs = nw, c[-1]  # sinh / cosh of the geodesic distance
    m = eye.copy()
    m[:d, :d] += (cs - 1.0) * np.outer(w_hat, w_hat)
    m[:d, -1] = s * w_hat
    m[-1, :d] = (s if space.curvature == HYPERBOLIC else -s) * w_hat
    m[-1, -1] = cs
    return m


@dataclass(frozen=True)
class Ball:
    """Closed geodesic ball.  A negative nominal radius yields the canonical
    empty set (radius stored as 0, ``empty`` set)."""

    center: np.ndarray
    radius: float
    empty: bool = False

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if not self.empty and self.radius < 0:
            raise ModelError("non-empty ball with negative radius; use Ball.of()")

    @classmethod
    def of(cls, center, nominal_radius: float) -> "Ball":
        """Ball from a nominal radius; negative values give the empty ball."""
        if nominal_radius < 0:
            return cls(center, 0.0, empty=True)
        return cls(center, float(nominal_radius))

    def check(self, space: Space) -> "Ball":
        validate_point(space, self.center)
        if space.curvature == SPHERICAL and self.radius > math.pi + 1e-12:
            raise ModelError(f"spherical ball radius {self.radius} exceeds pi")
        return self

    def contains(self, space: Space, x, slack: float = 0.0):
        """Membership test; batch-capable.  Empty balls contain nothing."""
        if self.empty:
            dist = distance(space, x, self.center)
            zero = np.zeros(np.shape(dist), dtype=bool)
            return bool(zero) if np.ndim(dist) == 0 else zero
        inside = distance(space, x, self.center) <= self.radius + slack
        return bool(inside) if np.ndim(inside) == 0 else inside
