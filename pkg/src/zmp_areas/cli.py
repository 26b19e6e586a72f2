"""Command line: scene ingestion, area/trajectory computations, benchmarks.

Exit codes: 0 on success, 2 on scene/usage errors, 3 on computational
failures; errors are emitted as one JSON object on stderr.
"""

import argparse
import json
import sys
import time
from importlib import resources

import numpy as np

from . import polyhedra
from .contacts import ContactPoint, ContactScene, ContactSurface, cwc_span
from .errors import ComputationError, SceneFormatError
from .geom import VirtualPlane
from .pendulum import TrajProblem, generate_trajectory, integrate_com, make_mode
from .polyhedra import VRep, vrep_to_hrep
from .support_areas import (
    area_vertices,
    full_support_area,
    full_support_area_cwc,
    nmp_support_volume,
    pendular_support_area_dd,
    pendular_support_area_rayshoot,
    static_equilibrium_polygon,
    zmp_lpm_feasible,
)
from .svg import render_area, render_trajectory

BUNDLED_SCENES = ("fig2", "fig3", "fig4", "fig5", "table3", "bench1", "bench2", "bench3")
QUAT_NORM_TOL = 1e-6


def quaternion_to_matrix(q):
    """Rotation matrix from a unit quaternion in (w, x, y, z) order."""
    q = np.asarray(q, dtype=float).reshape(4)
    norm = np.linalg.norm(q)
    if abs(norm - 1.0) > QUAT_NORM_TOL:
        raise SceneFormatError(f"quaternion norm {norm:.8f} differs from 1 by more than {QUAT_NORM_TOL}")
    w, x, y, z = q / norm
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def _need(doc, key, kinds, where):
    if key not in doc:
        raise SceneFormatError(f"missing '{key}' in {where}")
    val = doc[key]
    if kinds is not None and not isinstance(val, kinds):
        raise SceneFormatError(f"'{key}' in {where} has wrong type")
    return val


def _vec(doc, key, length, where):
    val = _need(doc, key, (list, tuple), where)
    if len(val) != length or not all(isinstance(v, (int, float)) for v in val):
        raise SceneFormatError(f"'{key}' in {where} must be {length} numbers")
    return np.asarray(val, dtype=float)


def parse_scene(doc):
    """Validate a scene document and build (ContactScene, VirtualPlane)."""
    if not isinstance(doc, dict):
        raise SceneFormatError("scene document must be a JSON object")
    raw_contacts = _need(doc, "contacts", list, "scene")
    if not raw_contacts:
        raise SceneFormatError("scene needs at least one contact")
    contacts = []
    for i, c in enumerate(raw_contacts):
        where = f"contacts[{i}]"
        if not isinstance(c, dict):
            raise SceneFormatError(f"{where} must be an object")
        kind = _need(c, "type", str, where)
        position = _vec(c, "position", 3, where)
        rotation = quaternion_to_matrix(_vec(c, "rotation", 4, where))
        friction = _need(c, "friction", (int, float), where)
        if friction <= 0:
            raise SceneFormatError(f"{where}: friction must be positive")
        if kind == "point":
            contacts.append(ContactPoint(position, rotation, float(friction)))
        elif kind == "surface":
            half = _vec(c, "half_lengths", 2, where)
            if np.any(half <= 0):
                raise SceneFormatError(f"{where}: half_lengths must be positive")
            contacts.append(ContactSurface(position, rotation, half, float(friction)))
        else:
            raise SceneFormatError(f"{where}: type must be 'point' or 'surface'")
    mass = _need(doc, "mass_kg", (int, float), "scene")
    if mass <= 0:
        raise SceneFormatError("mass_kg must be positive")
    com = _vec(doc, "com", 3, "scene")
    gravity = _vec(doc, "gravity", 3, "scene") if "gravity" in doc else np.array([0.0, 0.0, -9.81])
    plane_doc = _need(doc, "plane", dict, "scene")
    normal = _vec(plane_doc, "normal", 3, "plane")
    if np.linalg.norm(normal) < 1e-9:
        raise SceneFormatError("plane normal must be nonzero")
    d_z = _need(plane_doc, "d_z", (int, float), "plane")
    scene = ContactScene(contacts, float(mass), com, gravity)
    return scene, VirtualPlane(normal, float(d_z))


def scene_path(name):
    return resources.files("zmp_areas").joinpath("scenes", f"{name}.json")


def load_scene(spec):
    """Load a scene from a path or a bundled name (fig2..fig5, table3, bench1..3)."""
    if spec in BUNDLED_SCENES:
        text = scene_path(spec).read_text()
    else:
        try:
            with open(spec) as fh:
                text = fh.read()
        except OSError as exc:
            raise SceneFormatError(f"cannot read scene file: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneFormatError(f"scene file is not valid JSON: {exc}") from exc
    return parse_scene(doc)


def _round_trip_safe(obj):
    if isinstance(obj, dict):
        return {k: _round_trip_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_trip_safe(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _round_trip_safe(obj.tolist())
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def emit(doc, stream=None):
    json.dump(_round_trip_safe(doc), stream or sys.stdout, indent=2, sort_keys=True)
    (stream or sys.stdout).write("\n")


def _fail(exc, code):
    emit({"error": {"type": type(exc).__name__, "message": str(exc)}}, sys.stderr)
    return code


def _polygon_payload(polygon, plane):
    return {
        "vertices_plane": polygon.vertices,
        "vertices_world": plane.to_world(polygon.vertices) if len(polygon.vertices) else [],
    }


def _cone_payload(cone, plane):
    out = _polygon_payload(cone.apex, plane)
    out["ray_directions_plane"] = cone.ray_directions
    out["span"] = cone.span
    return out


def _area_payload(area):
    plane = area.plane
    out = {"shape": area.kind, "near_degenerate": area.near_degenerate}
    if area.kind == "polygon":
        out.update(_polygon_payload(area.polygon, plane))
    elif area.kind == "cone":
        out["cone"] = _cone_payload(area.cone_plus, plane)
    elif area.kind == "two_cones":
        out["cone_plus"] = _cone_payload(area.cone_plus, plane)
        out["cone_minus"] = _cone_payload(area.cone_minus, plane)
    return out


def cmd_area(args):
    scene, plane = load_scene(args.scene)
    algo = args.algo or {"full": "geometric", "nmp": "geometric"}.get(args.kind, "dd")
    valid = {
        "full": ("geometric", "dd"),
        "pendular": ("dd", "rayshoot"),
        "static": ("dd",),
        "nmp": ("geometric",),
    }[args.kind]
    if algo not in valid:
        raise SceneFormatError(f"--algo {algo} not supported for kind {args.kind}")

    start = time.perf_counter()
    area = volume = polygon = None
    if args.kind == "full":
        area = full_support_area(scene, plane) if algo == "geometric" else full_support_area_cwc(scene, plane)
    elif args.kind == "pendular":
        if algo == "dd":
            area = pendular_support_area_dd(scene, plane)
        else:
            polygon = pendular_support_area_rayshoot(scene, plane)
    elif args.kind == "static":
        polygon = static_equilibrium_polygon(scene)
    else:
        volume = nmp_support_volume(scene, plane)
    elapsed_us = (time.perf_counter() - start) * 1e6

    report = {
        "schema": "zmp-areas/area-report@1",
        "kind": args.kind,
        "algorithm": algo,
        "plane": {"normal": plane.normal, "d_z": plane.d_z},
        "timing_us": elapsed_us,
        "kernel_backend": polyhedra.KERNEL_BACKEND,
    }
    if args.kind == "full":
        gens = cwc_span(scene)
        report["pressures"] = gens.pressures(plane.normal)
        report.update(_area_payload(area))
    elif area is not None:
        report.update(_area_payload(area))
    elif polygon is not None:
        if args.kind == "static":
            world = np.column_stack([
                polygon.vertices, np.full(len(polygon.vertices), scene.com[2])
            ]) if len(polygon.vertices) else []
            report.update({"shape": "polygon", "vertices_plane": polygon.vertices,
                           "vertices_world": world})
        else:
            report.update({"shape": "polygon"})
            report.update(_polygon_payload(polygon, plane))
    else:
        report.update({
            "shape": volume.kind,
            "vertices_world": volume.vertices,
            "pressures": volume.pressures,
            "ray_directions": volume.ray_directions,
        })

    emit(report)
    if args.svg:
        if volume is not None:
            drawn = volume.project_area()
            verts = None
        elif polygon is not None:
            from .support_areas import SupportArea
            drawn = SupportArea(plane, "polygon", polygon=polygon)
            verts = None
        else:
            drawn = area
            verts = area_vertices(cwc_span(scene), plane) if args.kind == "full" else None
        with open(args.svg, "w") as fh:
            fh.write(render_area(scene, plane, drawn, verts,
                                 legend=[f"kind: {args.kind} ({algo})"]))
    return 0


def _parse_triplet(text, name):
    try:
        parts = [float(v) for v in text.split(",")]
    except ValueError:
        raise SceneFormatError(f"--{name} must be three comma-separated numbers")
    if len(parts) != 3:
        raise SceneFormatError(f"--{name} must be three comma-separated numbers")
    return np.array(parts)


def cmd_traj(args):
    scene, scene_plane = load_scene(args.scene)
    p0 = _parse_triplet(args.p0, "p0") if args.p0 else scene.com.copy()
    p1 = _parse_triplet(args.p1, "p1")
    d_z = args.dz if args.dz is not None else scene_plane.d_z
    plane = VirtualPlane(np.array([0.0, 0.0, 1.0]), d_z)
    mode = make_mode(p0[2], d_z, abs(scene.gravity[2]))
    problem = TrajProblem(p0, p1, args.steps, args.dt, mode)
    solution = generate_trajectory(problem)

    com = solution.com_points()
    zmp = solution.zmp_points()
    feasible, witnesses = [], 0
    for k in range(len(zmp)):
        forces = zmp_lpm_feasible(scene.with_com(com[k]), plane, zmp[k, :2])
        feasible.append(forces is not None)
        witnesses += forces is not None
    first_bad = next((k for k, ok in enumerate(feasible) if not ok), None)

    path = integrate_com(solution, damping=args.damping)
    report = {
        "schema": "zmp-areas/trajectory@1",
        "params": {
            "p0": p0, "p1": p1, "steps": args.steps, "dt": args.dt,
            "d_z": d_z, "mode": mode.kind, "omega": mode.omega,
            "damping": args.damping, "weights": [problem.w1, problem.w2],
        },
        "gamma": solution.gamma,
        "eta": solution.eta,
        "eta_dot": solution.eta_dot,
        "objective": solution.objective,
        "zmp_points": zmp,
        "com_points": com,
        "com_integrated": path.positions[::10],
        "feasible": feasible,
        "first_infeasible": first_bad,
    }
    emit(report)
    if args.svg:
        area0 = area1 = None
        try:
            area0 = pendular_support_area_dd(scene.with_com(p0), plane)
            area1 = pendular_support_area_dd(scene.with_com(p1), plane)
        except ComputationError:
            pass
        with open(args.svg, "w") as fh:
            fh.write(render_trajectory(solution, area0, area1, feasible))
    if first_bad is not None:
        raise ComputationError(
            f"trajectory leaves the pendular support area: first infeasible sample k={first_bad}"
        )
    return 0


BENCH_CRITERIA = ("full_geometric", "cwc_projection", "pendular_dd", "pendular_rayshoot")


def _bench_once(criterion, scene, plane, backend):
    if criterion == "full_geometric":
        full_support_area(scene, plane)
    elif criterion == "cwc_projection":
        gens = cwc_span(scene)
        vrep_to_hrep(VRep(np.zeros((0, 6)), gens.wrenches), backend=backend)
    elif criterion == "pendular_dd":
        pendular_support_area_dd(scene, plane, backend=backend)
    else:
        pendular_support_area_rayshoot(scene, plane)


def cmd_bench(args):
    scenes = args.scenes.split(",") if args.scenes else list(args.bench_default)
    kernels = {
        "auto": [polyhedra.KERNEL_BACKEND],
        "python": ["python"],
        "compiled": ["compiled"],
        "both": polyhedra.available_backends(),
    }[args.kernel]
    cells = []
    for criterion in BENCH_CRITERIA:
        backends = kernels if criterion in ("cwc_projection", "pendular_dd") else [None]
        for backend in backends:
            for name in scenes:
                scene, plane = load_scene(name)
                cell = {
                    "criterion": criterion,
                    "scene": name,
                    "kernel": backend or "n/a",
                    "repeats": args.repeats,
                }
                times = []
                status = "ok"
                for _ in range(args.repeats):
                    start = time.perf_counter()
                    try:
                        _bench_once(criterion, scene, plane, backend)
                    except ComputationError as exc:
                        status = type(exc).__name__
                        break
                    times.append((time.perf_counter() - start) * 1e3)
                if args.repeats == 0:
                    continue
                cell["status"] = status
                if times and status == "ok":
                    cell["mean_ms"] = float(np.mean(times))
                    cell["std_ms"] = float(np.std(times))
                cells.append(cell)
    report = {
        "schema": "zmp-areas/bench@1",
        "repeats": args.repeats,
        "scenes": scenes,
        "cells": cells,
    }
    if args.format == "json":
        emit(report)
    else:
        writer = sys.stdout
        writer.write("criterion,kernel," + ",".join(scenes) + "\n")
        rows = {}
        for cell in cells:
            rows.setdefault((cell["criterion"], cell["kernel"]), {})[cell["scene"]] = cell
        for (criterion, kernel), by_scene in rows.items():
            fields = [criterion, kernel]
            for name in scenes:
                cell = by_scene.get(name)
                if cell is None:
                    fields.append("")
                elif cell["status"] != "ok":
                    fields.append(cell["status"])
                else:
                    fields.append(f"{cell['mean_ms']:.3f}+-{cell['std_ms']:.3f}")
            writer.write(",".join(fields) + "\n")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="zmp-areas",
        description="Support areas and pendulum-mode trajectories for multi-contact scenes",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_area = sub.add_parser("area", help="compute a support area / region")
    p_area.add_argument("scene", help="scene file path or bundled name")
    p_area.add_argument("--kind", choices=("full", "pendular", "static", "nmp"), default="full")
    p_area.add_argument("--algo", choices=("geometric", "dd", "rayshoot"), default=None)
    p_area.add_argument("--svg", default=None, help="write an SVG rendering here")
    p_area.set_defaults(func=cmd_area)

    p_traj = sub.add_parser("traj", help="generate a ZMP/COM trajectory")
    p_traj.add_argument("scene")
    p_traj.add_argument("--p0", default=None, help="start COM x,y,z (default: scene com)")
    p_traj.add_argument("--p1", required=True, help="goal COM x,y,z")
    p_traj.add_argument("--steps", "-K", type=int, default=100)
    p_traj.add_argument("--dt", type=float, default=0.01)
    p_traj.add_argument("--dz", type=float, default=None, help="virtual plane height (default: scene plane)")
    p_traj.add_argument("--damping", type=float, default=0.1)
    p_traj.add_argument("--svg", default=None)
    p_traj.set_defaults(func=cmd_traj)

    p_bench = sub.add_parser("bench", help="timing table over the bundled scenes")
    p_bench.add_argument("--scenes", default=None, help="comma-separated scene names/paths")
    p_bench.add_argument("--repeats", type=int, default=5)
    p_bench.add_argument("--format", choices=("json", "csv"), default="json")
    p_bench.add_argument("--kernel", choices=("auto", "python", "compiled", "both"), default="auto")
    p_bench.set_defaults(func=cmd_bench, bench_default=("bench1", "bench2", "bench3"))
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SceneFormatError as exc:
        return _fail(exc, 2)
    except ComputationError as exc:
        return _fail(exc, 3)


if __name__ == "__main__":
    sys.exit(main())
