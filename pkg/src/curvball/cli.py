"""Command-line interface.

Subcommands surface the library pipelines: ball volumes (forward and
inverse), Monte Carlo dual volumes with exact planar cross-checks, the
verification suites, and SVG rendering.  Exit codes: 0 verified or no
violation, 2 inconclusive or precondition failure, 3 violation found.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from dataclasses import asdict

from . import __version__
from .contraction import (
    ContractionParams,
    PackingError,
    PreconditionUnmet,
    check_merged_radius_hyperbolic,
    check_merged_radius_spherical,
    sample_contracted_points,
    sample_separated_points,
    verify_contraction_instance,
    verify_dual_volume_maximality,
    verify_symmetrization_inclusion,
)
from .diskpoly import arc_polygon_area, disk_polygon
from .files import estimate_fields, load_point_set, make_report, report_json
from .geometry import EUCLIDEAN, HYPERBOLIC, SPHERICAL, ModelError, space_from_name
from .measure import (
    RngSpec,
    ball_volume,
    ball_volume_inverse,
    equal_volume_radius,
    estimate_volume,
)
from .oracles import dual_of_points, is_empty

EXIT_OK = 0
EXIT_INCONCLUSIVE = 2
EXIT_VIOLATION = 3


def _closed_form_volume(space, r: float) -> float | None:
    """Elementary formulas available in d = 2, 3 for cross-checking."""
    if space.dim == 2:
        if space.curvature == EUCLIDEAN:
            return math.pi * r**2
        if space.curvature == SPHERICAL:
            return 2.0 * math.pi * (1.0 - math.cos(r))
        return 2.0 * math.pi * (math.cosh(r) - 1.0)
    if space.dim == 3:
        if space.curvature == EUCLIDEAN:
            return 4.0 / 3.0 * math.pi * r**3
        if space.curvature == SPHERICAL:
            return math.pi * (2.0 * r - math.sin(2.0 * r))
        return math.pi * (math.sinh(2.0 * r) - 2.0 * r)
    return None


def _space_from_args(args):
    return space_from_name(args.space, args.dim)


def cmd_ball_volume(args) -> tuple[dict, int]:
    started = time.perf_counter()
    space = _space_from_args(args)
    params = {"space": args.space, "dim": args.dim, "seed": None}
    if args.inverse is not None:
        radius = ball_volume_inverse(space, args.inverse)
        payload = {
            "volume": args.inverse,
            "radius": radius,
            "round_trip_volume": ball_volume(space, radius),
            "closed_form_volume": _closed_form_volume(space, radius),
        }
        params["inverse"] = args.inverse
    else:
        if args.r is None:
            raise ModelError("ball-volume needs -r or --inverse")
        payload = {
            "radius": args.r,
            "volume": ball_volume(space, args.r),
            "closed_form_volume": _closed_form_volume(space, args.r),
        }
        params["r"] = args.r
    return make_report("ball-volume", params, payload, started), EXIT_OK


def cmd_dual_volume(args) -> tuple[dict, int]:
    started = time.perf_counter()
    psf = load_point_set(args.points)
    space = psf.space
    space.check_dual_radius(args.r)
    dual = dual_of_points(space, psf.points, args.r)
    payload: dict = {"n_points": psf.n_points, "r": args.r}
    exact = None
    if space.curvature == EUCLIDEAN and space.dim == 2:
        poly = disk_polygon(psf.points, args.r)
        exact = arc_polygon_area(poly)
        payload["exact_area"] = exact
        payload["degenerate"] = poly.degenerate
    emptiness = is_empty(dual, rng=RngSpec(args.seed).child(1))
    payload["emptiness"] = emptiness.status
    if emptiness.status == "empty":
        payload["estimate"] = {
            "value": 0.0, "std_err": 0.0, "ci95_lo": 0.0, "ci95_hi": 0.0,
            "n_samples": 0, "hits": 0,
        }
    else:
        est = estimate_volume(dual, dual.bound, args.n_mc, RngSpec(args.seed))
        payload["estimate"] = estimate_fields(est)
    params = {
        "points": args.points, "r": args.r, "n_mc": args.n_mc,
        "seed": args.seed, "space": space.name, "dim": space.dim,
    }
    return make_report("dual-volume", params, payload, started), EXIT_OK


def _verify_main(args, space, started) -> tuple[dict, int]:
    rep = verify_dual_volume_maximality(
        space, args.r, args.trials, args.n_mc, RngSpec(args.seed)
    )
    payload = {
        "violations": rep.violations,
        "worst_margin": rep.worst_margin,
        "records": [asdict(t) for t in rep.records],
        "verdict": "no-violation" if rep.violations == 0 else "violated",
    }
    params = {
        "space": space.name, "dim": space.dim, "r": args.r,
        "trials": args.trials, "n_mc": args.n_mc, "seed": args.seed,
    }
    code = EXIT_OK if rep.violations == 0 else EXIT_VIOLATION
    return make_report("verify-main", params, payload, started), code


def _verify_core_lemma(args, space, started) -> tuple[dict, int]:
    rep = verify_symmetrization_inclusion(
        space, args.r, args.trials, rng=RngSpec(args.seed)
    )
    payload = asdict(rep)
    payload["verdict"] = "no-refutation" if rep.refutations == 0 else "violated"
    params = {
        "space": space.name, "dim": space.dim, "r": args.r,
        "trials": args.trials, "seed": args.seed,
    }
    code = EXIT_OK if rep.refutations == 0 else EXIT_VIOLATION
    return make_report("verify-core-lemma", params, payload, started), code


def _verify_kp(args, space, started) -> tuple[dict, int]:
    if args.n_points is None or args.lam is None or args.delta is None:
        raise ModelError("verify kp needs -N, --lambda, and --delta")
    p = ContractionParams(space, args.n_points, args.lam, args.delta, args.k)
    params = {
        "space": space.name, "dim": space.dim, "n_points": args.n_points,
        "lam": args.lam, "delta": args.delta, "k": p.k,
        "n_mc": args.n_mc, "seed": args.seed,
    }
    rng = RngSpec(args.seed)
    try:
        separated = sample_separated_points(p, rng.child(0))
    except PackingError as exc:
        payload = {"verdict": "inconclusive", "reason": f"packing failure: {exc}"}
        return make_report("verify-kp", params, payload, started), EXIT_INCONCLUSIVE
    contracted = sample_contracted_points(p, rng.child(1))
    rep = verify_contraction_instance(p, separated, contracted, args.n_mc, rng.child(2))
    payload = {
        "threshold": rep.threshold,
        "meets_threshold": p.n_points >= rep.threshold,
        "f_lower": rep.f_lower,
        "g_upper": rep.g_upper,
        "vol_separated_dual": estimate_fields(rep.vol_separated_dual),
        "vol_contracted_dual": estimate_fields(rep.vol_contracted_dual),
        "sandwich_ok": rep.sandwich_ok,
        "degenerate_contraction": rep.degenerate_contraction,
        "verdict": rep.verdict,
    }
    code = {
        "verified": EXIT_OK,
        "inconclusive": EXIT_INCONCLUSIVE,
        "violated": EXIT_VIOLATION,
    }[rep.verdict]
    return make_report("verify-kp", params, payload, started), code


def _verify_props(args, space, started) -> tuple[dict, int]:
    if args.n_points is None or args.lam is None:
        raise ModelError("verify props needs -N and --lambda")
    params = {
        "space": space.name, "dim": space.dim, "n_points": args.n_points,
        "lam": args.lam, "delta": args.delta, "k": args.k, "seed": args.seed,
    }
    if space.curvature == SPHERICAL:
        holds = check_merged_radius_spherical(space.dim, args.n_points, args.lam)
        mu = equal_volume_radius(space, args.n_points, args.lam)
    elif space.curvature == HYPERBOLIC:
        if args.k is None or args.delta is None:
            raise ModelError("hyperbolic proposition needs -k and --delta")
        holds = check_merged_radius_hyperbolic(
            space.dim, args.k, args.n_points, args.lam, args.delta
        )
        mu = equal_volume_radius(space, args.n_points, args.lam)
    else:
        raise ModelError("merged-radius propositions exist for curved spaces only")
    payload = {"holds": holds, "mu": mu, "verdict": "holds" if holds else "violated"}
    code = EXIT_OK if holds else EXIT_VIOLATION
    return make_report("verify-props", params, payload, started), code


def cmd_verify(args) -> tuple[dict, int]:
    started = time.perf_counter()
    space = _space_from_args(args)
    handler = {
        "main": _verify_main,
        "core-lemma": _verify_core_lemma,
        "kp": _verify_kp,
        "props": _verify_props,
    }[args.which]
    return handler(args, space, started)


def cmd_render(args) -> tuple[dict, int]:
    from . import render

    started = time.perf_counter()
    if args.out is None:
        raise ModelError("render needs --out for the SVG path")
    if args.points is not None:
        psf = load_point_set(args.points)
        if args.r is None:
            raise ModelError("render --points needs the dual radius -r")
        path = render.render_dual_instance(psf.space, psf.points, args.r, args.out)
        what = "dual"
    else:
        space = _space_from_args(args)
        if args.demo == "symmetrization":
            path = render.render_symmetrization_demo(space, args.out, args.seed)
        elif args.demo == "kp":
            p = ContractionParams(space, args.n_points, args.lam, args.delta, args.k)
            path = render.render_contraction_demo(p, args.out, args.seed)
        elif args.demo == "union-dual":
            r = 1.0 if args.r is None else args.r
            path = render.render_union_dual_demo(space, r, args.out, args.seed)
        else:
            raise ModelError("render needs --points or --demo")
        what = args.demo
    payload = {"out": path, "what": what}
    return make_report("render", vars_without(args, "func"), payload, started), EXIT_OK


def vars_without(args, *skip) -> dict:
    return {k: v for k, v in vars(args).items() if k not in skip}


def _add_space_args(sp, dim_default=2):
    sp.add_argument(
        "--space", required=True,
        choices=["euclidean", "spherical", "hyperbolic"],
    )
    sp.add_argument("-d", "--dim", type=int, default=dim_default)


def _emit_text(report: dict, fh) -> None:
    def walk(prefix, node):
        if isinstance(node, dict):
            for key in sorted(node):
                walk(f"{prefix}{key}.", node[key])
        elif isinstance(node, list):
            fh.write(f"{prefix[:-1]} = [{len(node)} entries]\n")
        else:
            fh.write(f"{prefix[:-1]} = {node}\n")

    walk("", report)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="curvball",
        description="dual sets, symmetrization, and contraction volumes in "
        "constant-curvature spaces",
    )
    ap.add_argument("--version", action="version", version=f"curvball {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    bv = sub.add_parser("ball-volume", help="geodesic ball volume or its inverse")
    _add_space_args(bv)
    bv.add_argument("-r", type=float, default=None)
    bv.add_argument("--inverse", type=float, default=None, metavar="VOLUME")
    bv.set_defaults(func=cmd_ball_volume)

    dv = sub.add_parser("dual-volume", help="Monte Carlo volume of a point set's r-dual")
    dv.add_argument("--points", required=True, help="point-set JSON file")
    dv.add_argument("-r", type=float, required=True)
    dv.add_argument("--n-mc", dest="n_mc", type=int, default=100_000)
    dv.add_argument("--seed", type=int, default=0)
    dv.set_defaults(func=cmd_dual_volume)

    vf = sub.add_parser("verify", help="run a verification suite")
    vf.add_argument("which", choices=["main", "core-lemma", "kp", "props"])
    _add_space_args(vf)
    vf.add_argument("-r", type=float, default=1.0)
    vf.add_argument("-N", dest="n_points", type=int, default=None)
    vf.add_argument("--lambda", dest="lam", type=float, default=None)
    vf.add_argument("--delta", type=float, default=None)
    vf.add_argument("-k", type=float, default=None)
    vf.add_argument("--trials", type=int, default=200)
    vf.add_argument("--n-mc", dest="n_mc", type=int, default=100_000)
    vf.add_argument("--seed", type=int, default=0)
    vf.set_defaults(func=cmd_verify)

    rd = sub.add_parser("render", help="SVG figure of a planar instance")
    rd.add_argument("--points", default=None, help="point-set JSON file")
    rd.add_argument("--demo", default=None, choices=["symmetrization", "kp", "union-dual"])
    rd.add_argument(
        "--space", default="euclidean",
        choices=["euclidean", "spherical", "hyperbolic"],
    )
    rd.add_argument("-d", "--dim", type=int, default=2)
    rd.add_argument("-r", type=float, default=None)
    rd.add_argument("-N", dest="n_points", type=int, default=6)
    rd.add_argument("--lambda", dest="lam", type=float, default=1.0)
    rd.add_argument("--delta", type=float, default=1.0)
    rd.add_argument("-k", type=float, default=None)
    rd.add_argument("--seed", type=int, default=7)
    rd.add_argument("--out", default=None)
    rd.set_defaults(func=cmd_render)

    for sp in (bv, dv, vf, rd):
        sp.add_argument("--format", choices=["json", "text"], default="json")
    for sp in (bv, dv, vf):
        sp.add_argument("--out", default=None,
                        help="write the report to this path instead of stdout")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report, code = args.func(args)
    except (PreconditionUnmet, PackingError) as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except (ModelError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    out_path = args.out if args.command != "render" else None
    if out_path is not None:
        with open(out_path, "w") as fh:
            if args.format == "json":
                fh.write(report_json(report))
            else:
                _emit_text(report, fh)
    else:
        if args.format == "json":
            sys.stdout.write(report_json(report))
        else:
            _emit_text(report, sys.stdout)
    return code


if __name__ == "__main__":
    sys.exit(main())
