"""Command-line entry point.

Subcommands: analyze, transform, probe, metric, mesh. Exit codes:
0 = all checks passed, 1 = a mathematical check failed, 2 = input error,
3 = configuration guard (e.g. dual range too small).
"""

import argparse
import os
import sys

import numpy as np

from . import legendre, mesh, metricopt, sharpness
from .errors import (
    DualRangeError,
    InputError,
    PreconditionError,
    SharpminError,
)
from .io import (
    SCHEMA_VERSION,
    load_cloud,
    load_functional,
    load_grid,
    load_metric,
    load_tree,
    location_to_dict,
    write_report,
    _load_json,
)
from .metricspaces import node_loc

EXIT_OK = 0
EXIT_MATH = 1
EXIT_INPUT = 2
EXIT_GUARD = 3


def _out_path(args, name):
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


def _load_cloud_or_grid(path):
    data = _load_json(path)
    if "points" in data:
        return load_cloud(path), None
    if "bounds" in data:
        grid = load_grid(path)
        return grid.to_cloud(), grid
    raise InputError(f"{path}: expected a point-cloud or grid file")


def _subsample_grid(grid, step):
    """Restrict a grid to nodes on a coarser step (must divide evenly)."""
    from .funcspace import GridFunction

    strides = []
    for axis in range(grid.dimension):
        h0 = grid.spacings()[axis]
        stride = step / h0
        if abs(stride - round(stride)) > 1e-9 or round(stride) < 1:
            raise InputError(
                f"refinement step {step} is not a multiple of grid step {h0}"
            )
        strides.append(int(round(stride)))
    arr = grid.as_array()
    slicer = tuple(slice(None, None, s) for s in strides)
    sub = arr[slicer]
    bounds = []
    for axis in range(grid.dimension):
        coords = grid.axis_coords(axis)[:: strides[axis]]
        bounds.append((float(coords[0]), float(coords[-1])))
    return GridFunction(tuple(bounds), sub.shape, sub.ravel())


def cmd_analyze(args):
    cloud, grid = _load_cloud_or_grid(args.input)
    tol = args.tol
    report = {"schema_version": SCHEMA_VERSION, "command": "analyze", "tolerance": tol}
    try:
        result = sharpness.verify_characterizations(cloud, tol=tol)
    except sharpness.CharacterizationMismatchError as exc:
        report.update(
            {
                "agreement": False,
                "modulus": exc.modulus,
                "slope_infimum": exc.slope_infimum,
                "tilt_radius": exc.tilt_radius,
            }
        )
        write_report(report, _out_path(args, "analyze.json"))
        return EXIT_MATH
    report.update(result.to_dict())
    if args.refine:
        if grid is None:
            raise InputError("--refine requires a grid input")
        steps = sorted({float(s) for s in args.refine.split(",")}, reverse=True)
        schedule = []
        for step in steps:
            sub = _subsample_grid(grid, step)
            m, _ = sharpness.sharpness_modulus(sub.to_cloud())
            schedule.append({"step": step, "modulus": m})
        report["refinement"] = schedule
    write_report(report, _out_path(args, "analyze.json"))
    return EXIT_OK if result.agreement else EXIT_MATH


def cmd_transform(args):
    grid = load_grid(args.input)
    bounds = legendre.slope_bounds(grid)
    if args.dual_range is not None:
        ranges = tuple(float(L) for L in args.dual_range.split(","))
        if len(ranges) == 1:
            ranges = ranges * grid.dimension
    else:
        ranges = tuple(b * 1.25 + 1e-9 for b in bounds)
    resolution = tuple([args.dual_resolution] * grid.dimension)
    dual = legendre.DualGrid(ranges, resolution)
    result = legendre.transform(grid, dual)
    from .io import dump_grid

    dump_grid(result.conjugate, _out_path(args, "conjugate.json"))
    dump_grid(result.biconjugate, _out_path(args, "biconjugate.json"))
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "transform",
        "dual_ranges": list(ranges),
        "dual_resolution": list(resolution),
        "fenchel_young_violation": result.fy_violation,
    }
    if grid.dimension == 1:
        envelope = legendre.convex_envelope_1d(grid)
        dump_grid(envelope, _out_path(args, "envelope.json"))
        finite = np.isfinite(envelope.values)
        report["envelope_vs_biconjugate"] = float(
            np.max(np.abs(envelope.values[finite] - result.biconjugate.values[finite]))
        )
    base = grid.argmin_node()
    report["biconjugate_sharpness"] = legendre.verify_biconjugate_sharpness(
        grid, base, dual
    )
    write_report(report, _out_path(args, "report.json"))
    ok = (
        result.fy_violation <= 1e-9
        and report["biconjugate_sharpness"]["moduli_agree"]
        and report["biconjugate_sharpness"]["value_preserved"]
    )
    return EXIT_OK if ok else EXIT_MATH


def cmd_probe(args):
    cloud, _ = _load_cloud_or_grid(args.input)
    m, _w = sharpness.sharpness_modulus(cloud)
    report = {"schema_version": SCHEMA_VERSION, "command": "probe", "modulus": m}
    if args.tilt:
        xi = np.array([float(c) for c in args.tilt.split(",")])
        if len(xi) != cloud.dimension:
            raise InputError("tilt vector dimension mismatch")
        tilt = sharpness.TiltVector(xi)
        argmin = sharpness.tilt_probe(cloud, tilt)
        magnitude = tilt.norm
        kind = "tilt"
    elif args.mcshane:
        spec = _load_json(args.mcshane)
        zeta = sharpness.mcshane_extend(
            spec["anchors"], spec["values"], float(spec["constant"])
        )
        argmin = sharpness.lipschitz_probe(cloud, zeta)
        magnitude = zeta.constant
        kind = "mcshane"
    else:
        raise InputError("probe needs --tilt or --mcshane")
    invariant = argmin == [cloud.base_index]
    predicted_invariant = m > 0 and magnitude < m
    if invariant:
        verdict = "invariant (predicted)" if predicted_invariant else "invariant (not guaranteed)"
    else:
        verdict = "moved (unexpected)" if predicted_invariant else "moved (predicted)"
    report.update(
        {
            "perturbation": kind,
            "magnitude": magnitude,
            "argmin": argmin,
            "base_index": cloud.base_index,
            "verdict": verdict,
        }
    )
    write_report(report, _out_path(args, "probe.json"))
    return EXIT_OK if "unexpected" not in verdict else EXIT_MATH


def _sample_tree_locations(tree, rng, count):
    locs = []
    for _ in range(count):
        e = int(rng.integers(len(tree.edges)))
        t = float(rng.uniform(0.0, tree.edges[e][2]))
        locs.append(tree.canonicalize(metricopt.TreeLocation(edge=e, offset=t)))
    return locs


def cmd_metric(args):
    data = _load_json(args.input)
    rng = np.random.default_rng(args.seed)
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "metric",
        "seed": args.seed,
        "ball_convention": "closed",
    }
    ok = True
    if "matrix" in data:
        space = load_metric(args.input)
        kind, payload, base = load_functional(args.functional)
        if kind != "values":
            raise InputError("finite metric spaces take a 'values' functional")
        functional = metricopt.FiniteSpaceFunctional(space, payload, base)
        if args.ekeland:
            eps, lam, start = args.ekeland.split(",")
            result = metricopt.ekeland(functional, int(start), float(eps), float(lam))
            checks = metricopt.check_ekeland_result(functional, result)
            report["ekeland"] = {
                "x_hat": result.x_hat,
                "trace": list(result.trace),
                "eta": result.eta,
                "postconditions": list(checks),
            }
            ok = ok and all(checks)
        if args.check == "lipschitz":
            zeta = 0.9 * args.gamma * space.matrix[
                :, int(rng.integers(len(space)))
            ] * (1 if rng.uniform() < 0.5 else -1)
            argmin = metricopt.lipschitz_invariance_probe(functional, zeta, 0.9 * args.gamma, args.delta)
            contained = set(argmin) <= {functional.base_index}
            report["lipschitz"] = {"argmin_in_ball": argmin, "contained_in_base": contained}
            ok = ok and contained
        if args.check == "cat0":
            n = len(space)
            quads = [tuple(rng.integers(n, size=3)) for _ in range(args.samples)]
            result = metricopt.cat0_check(space, quads, np.linspace(0, 1, 9))
            report["cat0"] = {
                "ok": result["ok"],
                "worst_violation": result["worst_violation"],
                "witness": list(result["witness"]) if result["witness"] else None,
                "exact_geodesics": result["exact_geodesics"],
            }
            ok = ok and result["ok"]
        report["local_sharpness"] = metricopt.local_sharpness(functional, args.delta)
    else:
        tree = load_tree(args.input)
        kind, payload, base = load_functional(args.functional)
        if kind != "combination":
            raise InputError("tree inputs take a 'combination' functional")
        functional = metricopt.TreeFunctional(tree, payload, base)
        samples = functional.sample_locations()
        if args.check == "cat0":
            locs = _sample_tree_locations(tree, rng, args.samples)
            quads = [
                tuple(locs[int(i)] for i in rng.integers(len(locs), size=3))
                for _ in range(args.samples)
            ]
            result = metricopt.cat0_check(tree, quads, np.linspace(0, 1, 9))
            report["cat0"] = {
                "ok": result["ok"],
                "worst_violation": result["worst_violation"],
                "exact_geodesics": result["exact_geodesics"],
            }
            ok = ok and result["ok"]
        if args.check == "gconv":
            locs = _sample_tree_locations(tree, rng, max(8, args.samples // 8))
            pairs = [
                (locs[int(a)], locs[int(b)])
                for a, b in rng.integers(len(locs), size=(args.samples, 2))
            ]
            gok, worst, _ = metricopt.geodesic_convexity_check(
                tree, payload, pairs, np.linspace(0, 1, 9)
            )
            report["gconv"] = {"ok": gok, "worst_violation": worst}
            ok = ok and gok
        if args.check == "slope":
            result = metricopt.slope_sharpness_check(
                functional, args.delta, args.gamma, (0.5, 0.25, 0.125), samples=samples
            )
            report["slope"] = result
            ok = ok and result["sharp_with_gamma"] == all(result["slopes_meet_gamma"])
        report["local_sharpness"] = metricopt.local_sharpness(
            functional, args.delta, samples=samples
        )
        report["base"] = location_to_dict(functional.base_location)
    write_report(report, _out_path(args, "metric_report.json"))
    return EXIT_OK if ok else EXIT_MATH


def cmd_mesh(args):
    grid = load_grid(args.input)
    if grid.dimension != 2:
        raise InputError("mesh export requires a 2D grid")
    base = grid.argmin_node()
    m, _ = sharpness.sharpness_modulus(grid.to_cloud(base))
    vertices, faces, flat = mesh.triangulate_grid(grid)
    mesh.write_mesh(vertices, faces, _out_path(args, "surface.txt"))
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "mesh",
        "modulus": m,
        "base_node": base,
        "vertices": len(vertices),
        "faces": len(faces),
    }
    if args.tilt:
        xi = np.array([float(c) for c in args.tilt.split(",")])
        if len(xi) != 2:
            raise InputError("mesh tilt must be 2D")
        tilted = grid.values - grid.node_points() @ xi
        tv, tf, _ = mesh.triangulate_grid(grid, values=tilted)
        mesh.write_mesh(tv, tf, _out_path(args, "tilted.txt"))
        finite = np.isfinite(tilted)
        argmin = int(np.flatnonzero(finite)[np.argmin(tilted[finite])])
        report["tilt"] = list(float(c) for c in xi)
        report["tilted_argmin_node"] = argmin
        report["tilted_still_base"] = argmin == base
    if args.cone and m > 0:
        cone_vals = mesh.cone_surface_values(grid, base, m)
        excess = mesh.check_cone_below(grid, cone_vals)
        cv, cf, _ = mesh.triangulate_grid(grid, values=cone_vals)
        mesh.write_mesh(cv, cf, _out_path(args, "cone.txt"))
        report["cone_excess"] = excess
    write_report(report, _out_path(args, "mesh_report.json"))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sharpmin",
        description="Sharp-minimizer diagnostics on point clouds, grids and trees",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--input", required=True)
        p.add_argument("--out", default=".")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=1e-9)

    p = sub.add_parser("analyze", help="triple-characterization report")
    common(p)
    p.add_argument("--refine", help="comma-separated grid steps for a refinement study")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("transform", help="Legendre-Fenchel transform artifacts")
    common(p)
    p.add_argument("--dual-range", help="dual half-range (one value or per-axis list)")
    p.add_argument("--dual-resolution", type=int, default=401)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("probe", help="tilt / Lipschitz perturbation probe")
    common(p)
    p.add_argument("--tilt", help="tilt vector, e.g. 0.5,0")
    p.add_argument("--mcshane", help="JSON file with anchors, values, constant")
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("metric", help="metric-space and tree checks")
    common(p)
    p.add_argument("--functional", required=True)
    p.add_argument("--delta", type=float, default=float("inf"))
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--ekeland", help="eps,lambda,start")
    p.add_argument("--check", choices=["cat0", "gconv", "slope", "lipschitz"])
    p.add_argument("--samples", type=int, default=200)
    p.set_defaults(func=cmd_metric)

    p = sub.add_parser("mesh", help="surface geometry export")
    common(p)
    p.add_argument("--tilt", help="tilt vector, e.g. 0.5,0")
    p.add_argument("--cone", action="store_true", help="emit the fitted cone surface")
    p.set_defaults(func=cmd_mesh)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DualRangeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (InputError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SharpminError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MATH


if __name__ == "__main__":
    sys.exit(main())
