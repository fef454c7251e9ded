"""Scenario configuration, task dispatch, parameter sweeps, and the CLI.

Scenarios are described by JSON documents (see docs/config.md for the full
schema).  Each task writes one CSV artifact with a fixed column contract;
bodies are byte-deterministic, with a single timestamped comment line on
top.  Sweeps patch the document at up to two parameter paths, evaluate
every grid point independently (optionally across worker processes), and
record per-point failures in a status column instead of aborting.
"""

from __future__ import annotations

import argparse
import copy
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import dynamics, eigen
from .discretize import Grid, assemble, build_grid
from .dynamics import Extinct, FieldState, GrowthModel
from .errors import ConfigError, NumericalError, RiverNetError, SchemaViolation, UnknownPreset
from .graph import (
    BoundaryCondition,
    EdgeParams,
    PRESET_NAMES,
    RiverNetwork,
    SharedParams,
    boundary_set,
    build_network,
    preset,
    preset_edge_count,
)
from .hydrology import ChannelSpec, apply_hydrology

TASKS = ("validate", "lambda", "r0", "steady", "simulate", "sweep")
_FMT = "{:.12g}"


@dataclass(frozen=True)
class Scenario:
    """A fully validated unit of work."""
    scenario_id: str
    task: str
    network: RiverNetwork
    grid: Grid
    growth: GrowthModel
    document: dict = field(repr=False)
    warnings: tuple[str, ...] = ()
    sweep_axes: tuple[dict, ...] = ()
    sweep_task: str = "r0"
    simulate_spec: dict = field(default_factory=dict)


# -- document loading --------------------------------------------------------

def load_config(document: dict | str | Path) -> Scenario:
    """Validate a configuration document into a Scenario.

    Accepts a dict, a JSON string, or a path to a JSON file.  Raises
    SchemaViolation with the offending field path on malformed input;
    range oddities (rates above 1/s and the like) are collected as
    non-fatal warnings on the scenario.
    """
    if isinstance(document, (str, Path)):
        path = Path(document)
        if path.exists():
            document = json.loads(path.read_text())
        elif isinstance(document, str) and document.lstrip().startswith("{"):
            document = json.loads(document)
        else:
            raise SchemaViolation(str(document), "config file not found")
    if not isinstance(document, dict):
        raise SchemaViolation("$", "config document must be a JSON object")

    doc = copy.deepcopy(document)
    warnings: list[str] = []

    task = _require(doc, "task", str)
    if task not in TASKS:
        raise SchemaViolation("task", f"unknown task {task!r}; one of {TASKS}")

    network, n_edges = _build_network_section(doc, warnings)
    grid_doc = doc.get("grid", {})
    _expect(grid_doc, dict, "grid")
    target_h = grid_doc.get("target_h", 2.0)
    if not isinstance(target_h, (int, float)) or target_h <= 0:
        raise SchemaViolation("grid.target_h", "must be a positive number")
    grid = build_grid(network, float(target_h))

    growth = GrowthModel.from_network(network)
    for j, p in enumerate(network.params):
        # 0.01/s is 864/day: almost certainly a forgotten per-day conversion
        if p.r > 0.01:
            warnings.append(f"params.r on edge {j} is {p.r} /s; "
                            "per-day rates must be divided by 86400")
        if p.m > 0.01:
            warnings.append(f"params.m on edge {j} is {p.m} /s; "
                            "per-day rates must be divided by 86400")
        if p.v > 10.0:
            warnings.append(f"advection on edge {j} is {p.v} m/s; check units")

    axes: tuple[dict, ...] = ()
    sweep_task = "r0"
    if task == "sweep":
        sweep_doc = _require(doc, "sweep", dict)
        raw_axes = _require(sweep_doc, "sweep.axes", list, container=sweep_doc, key="axes")
        if not 1 <= len(raw_axes) <= 2:
            raise SchemaViolation("sweep.axes", "need 1 or 2 axes")
        axes = tuple(_normalize_axis(ax, i, doc) for i, ax in enumerate(raw_axes))
        sweep_task = sweep_doc.get("task", "r0")
        if sweep_task not in ("r0", "lambda"):
            raise SchemaViolation("sweep.task", "sweep evaluates 'r0' or 'lambda'")

    simulate_spec = {}
    if task == "simulate":
        sim = _require(doc, "simulate", dict)
        simulate_spec = {
            "t_end": _require(sim, "simulate.t_end", (int, float), container=sim, key="t_end"),
            "dt": _require(sim, "simulate.dt", (int, float), container=sim, key="dt"),
            "samples": int(sim.get("samples", 5)),
            "u0": float(sim.get("u0", 0.01)),
            "theta": float(sim.get("theta", 1.0)),
        }
        if simulate_spec["t_end"] <= 0 or simulate_spec["dt"] <= 0:
            raise SchemaViolation("simulate", "t_end and dt must be positive")

    scenario_id = doc.get("scenario_id")
    if scenario_id is None:
        npart = doc["network"].get("preset", "custom")
        scenario_id = f"{npart}-{task}"

    return Scenario(
        scenario_id=str(scenario_id),
        task=task,
        network=network,
        grid=grid,
        growth=growth,
        document=doc,
        warnings=tuple(warnings),
        sweep_axes=axes,
        sweep_task=sweep_task,
        simulate_spec=simulate_spec,
    )


def _require(doc, path, types, container=None, key=None):
    container = doc if container is None else container
    key = path if key is None else key
    if key not in container:
        raise SchemaViolation(path, "required field is missing")
    value = container[key]
    if not isinstance(value, types) or isinstance(value, bool):
        raise SchemaViolation(path, f"expected {types}, got {type(value).__name__}")
    return value


def _expect(value, types, path):
    if not isinstance(value, types):
        raise SchemaViolation(path, f"expected {types}, got {type(value).__name__}")


def _per_edge(doc_value, n_edges: int, path: str, default=None) -> list[float]:
    """Expand a scalar or an {edge-id: value} map to a per-edge list."""
    if doc_value is None:
        if default is None:
            raise SchemaViolation(path, "required field is missing")
        doc_value = default
    if isinstance(doc_value, (int, float)) and not isinstance(doc_value, bool):
        return [float(doc_value)] * n_edges
    if isinstance(doc_value, dict):
        out = [None] * n_edges
        for k, val in doc_value.items():
            try:
                j = int(k)
            except ValueError:
                raise SchemaViolation(f"{path}.{k}", "edge ids are integers") from None
            if not 0 <= j < n_edges:
                raise SchemaViolation(f"{path}.{k}", f"edge id out of range 0..{n_edges - 1}")
            if not isinstance(val, (int, float)) or isinstance(val, bool):
                raise SchemaViolation(f"{path}.{k}", "expected a number")
            out[j] = float(val)
        if any(x is None for x in out):
            missing = [j for j, x in enumerate(out) if x is None]
            raise SchemaViolation(path, f"missing edges {missing}; give a scalar or all edges")
        return out
    raise SchemaViolation(path, "expected a number or an {edge-id: value} map")


def _build_network_section(doc: dict, warnings: list[str]) -> tuple[RiverNetwork, int]:
    net_doc = _require(doc, "network", dict)
    params_doc = _require(doc, "params", dict)
    if "boundary" not in doc:
        raise SchemaViolation("boundary", "required field is missing")
    boundary_doc = doc["boundary"]

    if "preset" in net_doc:
        name = net_doc["preset"]
        if name not in PRESET_NAMES:
            raise UnknownPreset(f"network.preset: {name!r}; known: {', '.join(PRESET_NAMES)}")
        n_edges = preset_edge_count(name)
        if ("branch_length" in net_doc) == ("total_length" in net_doc):
            raise SchemaViolation(
                "network", "give exactly one of branch_length or total_length")
        if "branch_length" in net_doc:
            branch = float(net_doc["branch_length"])
        else:
            branch = float(net_doc["total_length"]) / n_edges
        if branch <= 0:
            raise SchemaViolation("network", "branch length must be positive")

        flow_doc = doc.get("flow", {})
        _expect(flow_doc, dict, "flow")
        blabel = boundary_doc if isinstance(boundary_doc, str) else "ZF-FF"
        shared = SharedParams(
            D=1.0, r=0.0, m=0.0,
            v=float(flow_doc.get("v", 0.0015)),
            A=float(flow_doc.get("A", 1.0)),
            regime=flow_doc.get("regime", "A-fixed"),
            boundary=blabel if blabel in ("ZF-FF", "ZF-H", "H-H") else "ZF-FF",
        )
        network = preset(name, branch, shared)
    else:
        edges_doc = _require(net_doc, "network.edges", list, container=net_doc, key="edges")
        edge_defs = []
        for i, e in enumerate(edges_doc):
            _expect(e, dict, f"network.edges[{i}]")
            for fieldname in ("tail", "head", "length"):
                if fieldname not in e:
                    raise SchemaViolation(f"network.edges[{i}].{fieldname}", "missing")
            edge_defs.append((int(e["tail"]), int(e["head"]), float(e["length"])))
        n_edges = len(edge_defs)
        n_vertices = 1 + max(max(t, h) for t, h, _ in edge_defs)
        flow_doc = doc.get("flow", {})
        _expect(flow_doc, dict, "flow")
        v_list = _per_edge(flow_doc.get("v"), n_edges, "flow.v", default=0.0)
        a_list = _per_edge(flow_doc.get("A"), n_edges, "flow.A", default=1.0)

    # per-edge biology/transport parameters
    D_list = _per_edge(params_doc.get("D"), n_edges, "params.D")
    r_list = _per_edge(params_doc.get("r"), n_edges, "params.r")
    m_list = _per_edge(params_doc.get("m"), n_edges, "params.m")
    K_list = _per_edge(params_doc.get("K", 1.0), n_edges, "params.K")
    per_edge_over = params_doc.get("per_edge", {})
    _expect(per_edge_over, dict, "params.per_edge")
    for k, over in per_edge_over.items():
        j = int(k)
        if not 0 <= j < n_edges:
            raise SchemaViolation(f"params.per_edge.{k}", "edge id out of range")
        _expect(over, dict, f"params.per_edge.{k}")
        for fieldname, target in (("D", D_list), ("r", r_list), ("m", m_list), ("K", K_list)):
            if fieldname in over:
                target[j] = float(over[fieldname])

    if "preset" in net_doc:
        new_params = [
            EdgeParams(D=D_list[j], v=network.params[j].v, A=network.params[j].A,
                       r=r_list[j], m=m_list[j], K=K_list[j])
            for j in range(n_edges)
        ]
        network = network.with_params(new_params)
    else:
        params = [EdgeParams(D=D_list[j], v=v_list[j], A=a_list[j],
                             r=r_list[j], m=m_list[j], K=K_list[j])
                  for j in range(n_edges)]
        bmap = _boundary_map(boundary_doc, edge_defs, n_vertices)
        network = build_network(range(n_vertices), edge_defs, params, bmap)

    if isinstance(boundary_doc, dict) and "preset" in net_doc:
        bmap = _explicit_boundary(boundary_doc, network)
        network = RiverNetwork(network.vertices, network.edges, network.params, bmap).validate()
    elif isinstance(boundary_doc, str) and "preset" in net_doc:
        if boundary_doc not in ("ZF-FF", "ZF-H", "H-H"):
            raise SchemaViolation("boundary", f"unknown boundary set {boundary_doc!r}")
    elif not isinstance(boundary_doc, (str, dict)):
        raise SchemaViolation("boundary", "expected a set label or a vertex map")

    if "hydrology" in doc:
        hydro = doc["hydrology"]
        _expect(hydro, dict, "hydrology")
        B_list = _per_edge(hydro.get("B"), n_edges, "hydrology.B")
        n_list = _per_edge(hydro.get("n"), n_edges, "hydrology.n")
        s_list = _per_edge(hydro.get("S0"), n_edges, "hydrology.S0")
        q_doc = hydro.get("Q", {})
        _expect(q_doc, dict, "hydrology.Q")
        discharges = {}
        for k, val in q_doc.items():
            j = int(k)
            if not 0 <= j < n_edges:
                raise SchemaViolation(f"hydrology.Q.{k}", "edge id out of range")
            discharges[j] = float(val)
        specs = {j: ChannelSpec(B=B_list[j], n=n_list[j], S0=s_list[j])
                 for j in range(n_edges)}
        network = apply_hydrology(network, specs, discharges)

    return network, n_edges


def _boundary_map(boundary_doc, edge_defs, n_vertices):
    """Boundary conditions for an explicit-edge network document."""
    tails = {t for t, _, _ in edge_defs}
    heads = {h for _, h, _ in edge_defs}
    degree = {}
    for t, h, _ in edge_defs:
        degree[t] = degree.get(t, 0) + 1
        degree[h] = degree.get(h, 0) + 1

    class _V:
        def __init__(self, i, vclass):
            self.id = i
            self.vclass = vclass

    from .graph import VertexClass
    provisional = []
    for i in range(n_vertices):
        if degree.get(i, 0) == 1:
            vclass = VertexClass.UPSTREAM if i in tails else VertexClass.DOWNSTREAM
        else:
            vclass = VertexClass.JUNCTION
        provisional.append(_V(i, vclass))

    if isinstance(boundary_doc, str):
        return boundary_set(provisional, boundary_doc)
    if isinstance(boundary_doc, dict):
        return _explicit_boundary(boundary_doc, None, provisional)
    raise SchemaViolation("boundary", "expected a set label or a vertex map")


def _explicit_boundary(boundary_doc: dict, network, provisional=None):
    out = {}
    for k, spec in boundary_doc.items():
        vid = int(k)
        _expect(spec, dict, f"boundary.{k}")
        kind = spec.get("kind")
        if kind == "zero-flux":
            out[vid] = BoundaryCondition.zero_flux()
        elif kind == "free-flow":
            out[vid] = BoundaryCondition.free_flow()
        elif kind == "hostile":
            out[vid] = BoundaryCondition.hostile()
        elif kind == "robin":
            out[vid] = BoundaryCondition.robin(float(spec.get("alpha", 0.0)),
                                               float(spec.get("beta", 0.0)))
        else:
            raise SchemaViolation(f"boundary.{k}.kind", f"unknown kind {kind!r}")
    return out


def _normalize_axis(ax, index: int, doc: dict) -> dict:
    path = f"sweep.axes[{index}]"
    _expect(ax, dict, path)
    if "path" not in ax:
        raise SchemaViolation(f"{path}.path", "required field is missing")
    _resolve_path(doc, ax["path"], f"{path}.path")  # must resolve in the base doc
    label = ax.get("label", ax["path"].split(".")[-1] if "." in ax["path"] else ax["path"])
    if "values" in ax:
        values = list(ax["values"])
        if not values:
            raise SchemaViolation(f"{path}.values", "must be non-empty")
    else:
        for fieldname in ("start", "stop", "count"):
            if fieldname not in ax:
                raise SchemaViolation(f"{path}.{fieldname}", "required field is missing")
        count = int(ax["count"])
        if count < 1:
            raise SchemaViolation(f"{path}.count", "must be >= 1")
        values = np.linspace(float(ax["start"]), float(ax["stop"]), count).tolist()
    return {"path": ax["path"], "label": str(label), "values": values}


def _resolve_path(doc: dict, path: str, where: str):
    node = doc
    parts = path.split(".")
    for part in parts[:-1]:
        if not isinstance(node, dict) or part not in node:
            raise SchemaViolation(where, f"parameter path {path!r} does not resolve")
        node = node[part]
    if not isinstance(node, dict) or parts[-1] not in node:
        raise SchemaViolation(where, f"parameter path {path!r} does not resolve")
    return node, parts[-1]


def _patch(doc: dict, path: str, value) -> dict:
    out = copy.deepcopy(doc)
    node, leaf = _resolve_path(out, path, "sweep")
    node[leaf] = value
    return out


# -- task execution ----------------------------------------------------------

def run(scenario: Scenario, out_dir: str | Path = ".", jobs: int = 1) -> tuple[int, list[Path]]:
    """Execute the scenario's task; returns (exit code, written files).

    Exit codes: 0 success, 2 configuration error, 3 numerical failure.
    Failures also emit a machine-readable JSON line on stderr.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for w in scenario.warnings:
        _emit_diag({"warning": w})
    try:
        files = _dispatch(scenario, out_dir, jobs)
        return 0, files
    except ConfigError as exc:
        _emit_diag({"error": type(exc).__name__, "message": str(exc)})
        return 2, []
    except NumericalError as exc:
        _emit_diag({"error": type(exc).__name__, "message": str(exc)})
        return 3, []


def _emit_diag(payload: dict):
    print(json.dumps(payload), file=sys.stderr)


def _dispatch(scenario: Scenario, out_dir: Path, jobs: int) -> list[Path]:
    task = scenario.task
    if task == "validate":
        print(_validate_summary(scenario))
        return []
    if task == "lambda":
        lam = _lambda_outcome(scenario.network, scenario.grid)
        body = [["scenario_id", "lambda_star", "iterations", "residual"],
                [scenario.scenario_id, _FMT.format(lam.value),
                 str(lam.iterations), _FMT.format(lam.residual)]]
        return [_write_csv(out_dir / "lambda.csv", body)]
    if task == "r0":
        lam = _lambda_outcome(scenario.network, scenario.grid)
        r0 = eigen.net_reproductive_rate(scenario.network, scenario.grid)
        body = [["scenario_id", "R0", "lambda_star", "iterations", "residual"],
                [scenario.scenario_id, _FMT.format(r0.value), _FMT.format(lam.value),
                 str(r0.iterations), _FMT.format(r0.residual)]]
        return [_write_csv(out_dir / "r0.csv", body)]
    if task == "steady":
        return [_run_steady(scenario, out_dir)]
    if task == "simulate":
        return [_run_simulate(scenario, out_dir)]
    if task == "sweep":
        rows, header = sweep(scenario, jobs=jobs)
        return [_write_csv(out_dir / "r0_sweep.csv", [header] + rows)]
    raise SchemaViolation("task", f"unhandled task {task!r}")


def _lambda_outcome(network, grid):
    op = assemble(network, grid, potential=eigen.growth_potential(network, grid))
    return eigen.principal_eigenvalue(op)


def _validate_summary(scenario: Scenario) -> str:
    net = scenario.network
    lines = [
        f"scenario {scenario.scenario_id}: network valid",
        f"  vertices: {net.n_vertices} ({len(net.upstream_vertices())} upstream, "
        f"{len(net.downstream_vertices())} downstream, {len(net.junctions())} junctions)",
        f"  edges: {net.n_edges}",
        f"  grid: {scenario.grid.n_nodes} unknowns",
    ]
    return "\n".join(lines)


def _run_steady(scenario: Scenario, out_dir: Path) -> Path:
    result = dynamics.steady_state(scenario.network, scenario.grid, scenario.growth)
    if isinstance(result, Extinct):
        r0 = eigen.net_reproductive_rate(scenario.network, scenario.grid)
        body = [["status", "R0", "lambda_star"],
                ["extinct", _FMT.format(r0.value), _FMT.format(result.lambda_star)]]
        return _write_csv(out_dir / "steady.csv", body)
    rows = [["edge_id", "x_m", "u"]]
    grid = scenario.grid
    for e in scenario.network.edges:
        xs = grid.positions(e.id)
        nodes = grid.edge_nodes(e.id)
        for x, i in zip(xs, nodes):
            rows.append([str(e.id), _FMT.format(x), _FMT.format(result.values[i])])
    return _write_csv(out_dir / "steady.csv", rows)


def _run_simulate(scenario: Scenario, out_dir: Path) -> Path:
    spec = scenario.simulate_spec
    grid = scenario.grid
    op = assemble(scenario.network, grid, potential=0.0)
    u0 = np.full(grid.n_nodes, spec["u0"])
    u0[op.hostile_mask] = 0.0
    t_end, dt = float(spec["t_end"]), float(spec["dt"])
    samples = max(2, spec["samples"])
    times = np.linspace(0.0, t_end, samples)[1:]
    states = dynamics.simulate(
        FieldState(values=u0, time=0.0), op, scenario.growth,
        t_end=t_end, dt=dt, theta=spec["theta"], sample_times=list(times))
    rows = [["t_s", "edge_id", "x_m", "u"]]
    for st in states:
        for e in scenario.network.edges:
            xs = grid.positions(e.id)
            nodes = grid.edge_nodes(e.id)
            for x, i in zip(xs, nodes):
                rows.append([_FMT.format(st.time), str(e.id),
                             _FMT.format(x), _FMT.format(st.values[i])])
    return _write_csv(out_dir / "field.csv", rows)


# -- sweeps -------------------------------------------------------------------

def _sweep_point(args: tuple[dict, str]) -> list[str]:
    """Evaluate one sweep point; failures land in the status column."""
    doc, sweep_task = args
    try:
        sc = load_config(doc)
        lam = _lambda_outcome(sc.network, sc.grid)
        if sweep_task == "r0":
            r0 = eigen.net_reproductive_rate(sc.network, sc.grid)
            r0_text = _FMT.format(r0.value)
            iters = r0.iterations
        else:
            r0_text = ""
            iters = lam.iterations
        return [r0_text, _FMT.format(lam.value), str(sc.grid.n_nodes),
                str(iters), "ok"]
    except RiverNetError as exc:
        return ["", "", "", "", f"error:{type(exc).__name__}"]


def sweep(scenario: Scenario, jobs: int = 1) -> tuple[list[list[str]], list[str]]:
    """Evaluate the axes grid in row-major order; never aborts on a point.

    Returns (rows, header); each row carries the axis values first, then
    R0, lambda_star, n_unknowns, iterations, status.
    """
    axes = scenario.sweep_axes
    if not axes:
        raise SchemaViolation("sweep.axes", "sweep task needs axes")
    base = scenario.document

    points: list[tuple] = []
    if len(axes) == 1:
        for val in axes[0]["values"]:
            points.append((val,))
    else:
        for v0 in axes[0]["values"]:
            for v1 in axes[1]["values"]:
                points.append((v0, v1))

    docs = []
    for values in points:
        doc = base
        for ax, val in zip(axes, values):
            doc = _patch(doc, ax["path"], val)
        doc = dict(doc)
        doc["task"] = scenario.sweep_task
        docs.append((doc, scenario.sweep_task))

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_point, docs, chunksize=1))
    else:
        results = [_sweep_point(d) for d in docs]

    header = [ax["label"] for ax in axes] + ["R0", "lambda_star", "n_unknowns",
                                             "iterations", "status"]
    rows = []
    for values, result in zip(points, results):
        prefix = [v if isinstance(v, str) else _FMT.format(v) for v in values]
        rows.append(prefix + result)
    return rows, header


# -- CSV ----------------------------------------------------------------------

def _write_csv(path: Path, rows: list[list[str]]) -> Path:
    stamp = datetime.now(timezone.utc).isoformat()
    lines = [f"# generated {stamp}"]
    lines += [",".join(row) for row in rows]
    path.write_text("\n".join(lines) + "\n")
    return path


def csv_body(path: str | Path) -> str:
    """CSV content without the timestamped comment header (for diffing)."""
    lines = Path(path).read_text().splitlines()
    return "\n".join(line for line in lines if not line.startswith("#")) + "\n"


# -- CLI ------------------------------------------------------------------------

def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="rivernet",
        description="Persistence metrics and dynamics for river-network populations",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in TASKS:
        p = sub.add_parser(name, help=f"run the {name} task")
        p.add_argument("--config", required=True, help="path to a JSON scenario document")
        p.add_argument("--preset", default=None, help="override network.preset")
        p.add_argument("--target-h", type=float, default=None,
                       help="override grid.target_h (meters)")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--jobs", type=int, default=1,
                       help="worker processes for sweep points")

    args = parser.parse_args(argv)
    try:
        doc = json.loads(Path(args.config).read_text())
    except FileNotFoundError:
        _emit_diag({"error": "ConfigError", "message": f"no such config: {args.config}"})
        return 2
    except json.JSONDecodeError as exc:
        _emit_diag({"error": "SchemaViolation", "message": f"invalid JSON: {exc}"})
        return 2

    if not isinstance(doc, dict):
        _emit_diag({"error": "SchemaViolation", "message": "config must be a JSON object"})
        return 2
    doc["task"] = args.command
    if args.preset is not None:
        doc.setdefault("network", {})["preset"] = args.preset
    if args.target_h is not None:
        doc.setdefault("grid", {})["target_h"] = args.target_h

    try:
        scenario = load_config(doc)
    except ConfigError as exc:
        _emit_diag({"error": type(exc).__name__, "message": str(exc)})
        return 2

    code, files = run(scenario, out_dir=args.out, jobs=args.jobs)
    for f in files:
        print(f)
    return code


if __name__ == "__main__":
    sys.exit(main())
