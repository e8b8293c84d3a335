"""JSON file formats: point sets in, reports out.

Point-set files carry explicit "space" and "dim" headers so the three
geometries can never be confused silently.  Curved-space points are stored
embedded (length d+1); intrinsic coordinates are accepted for flat space
only.  Reports split into a deterministic payload (byte-identical across
reruns with the same seed) and a small meta block for wall-clock and other
run-local noise.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass

import numpy as np

from . import __version__
from .geometry import EUCLIDEAN, ModelError, Space, project, space_from_name
from .measure import VolumeEstimate

_RENORM_TOL = 1e-6

_MODEL_NAMES = ("euclidean", "spherical", "hyperbolic")


@dataclass(frozen=True)
class PointSetFile:
    space: Space
    points: np.ndarray
    coordinates: str

    @property
    def n_points(self) -> int:
        return len(self.points)


def _coerce_points(space: Space, raw, coordinates: str) -> np.ndarray:
    pts = np.asarray(raw, dtype=float)
    if pts.ndim != 2:
        raise ModelError("points must be a list of coordinate arrays")
    if coordinates == "intrinsic":
        if space.curvature != EUCLIDEAN:
            raise ModelError("intrinsic coordinates are defined for euclidean space only")
        if pts.shape[1] != space.dim:
            raise ModelError(
                f"expected {space.dim} intrinsic coordinates, got {pts.shape[1]}"
            )
        return pts
    if coordinates != "embedded":
        raise ModelError(f"unknown coordinates mode {coordinates!r}")
    if pts.shape[1] != space.embed_dim:
        raise ModelError(
            f"expected {space.embed_dim} embedded coordinates, got {pts.shape[1]}"
        )
    if space.curvature == EUCLIDEAN:
        return pts
    cleaned = np.empty_like(pts)
    for i, x in enumerate(pts):
        fixed = project(space, x)
        if np.linalg.norm(fixed - x) > _RENORM_TOL:
            raise ModelError(
                f"point {i} is off the model surface beyond the {_RENORM_TOL} "
                "renormalization tolerance"
            )
        cleaned[i] = fixed
    return cleaned


def load_point_set(path: str) -> PointSetFile:
    """Read and validate a point-set JSON file.

    Points within 1e-6 of the curved model surface are renormalized onto
    it; anything farther off is a hard failure.
    """
    with open(path) as fh:
        doc = json.load(fh)
    for key in ("space", "dim", "points"):
        if key not in doc:
            raise ModelError(f"point-set file is missing the {key!r} header")
    if doc["space"] not in _MODEL_NAMES:
        raise ModelError(f"unknown space {doc['space']!r}")
    space = space_from_name(doc["space"], int(doc["dim"]))
    default = "intrinsic" if space.curvature == EUCLIDEAN else "embedded"
    coordinates = doc.get("coordinates", default)
    pts = _coerce_points(space, doc["points"], coordinates)
    if len(pts) == 0:
        raise ModelError("point-set file holds no points")
    return PointSetFile(space, pts, coordinates)


def save_point_set(path: str, psf: PointSetFile) -> None:
    doc = {
        "space": psf.space.name,
        "dim": psf.space.dim,
        "coordinates": psf.coordinates,
        "points": [[float(v) for v in row] for row in np.atleast_2d(psf.points)],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def estimate_fields(est: VolumeEstimate) -> dict:
    return {
        "value": est.value,
        "std_err": est.std_err,
        "ci95_lo": est.lo,
        "ci95_hi": est.hi,
        "n_samples": est.n_samples,
        "hits": est.hits,
    }


def make_report(command: str, params: dict, payload: dict, started: float | None = None) -> dict:
    """Assemble the standard report document.

    Everything outside "meta" is a pure function of the inputs; meta takes
    the wall clock so reruns stay byte-comparable after dropping it.
    """
    report = {
        "command": command,
        "params": params,
        "payload": payload,
        "version": __version__,
    }
    if started is not None:
        report["meta"] = {"wall_clock_s": round(time.perf_counter() - started, 6)}
    return report


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"
