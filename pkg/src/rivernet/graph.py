"""Oriented metric trees representing river networks.

A network is a finite tree whose edges carry an arc-length coordinate
running from the upstream end (x = 0, the *tail*) to the downstream end
(x = l, the *head*).  Vertices are classified by valency and orientation:
valency-1 tails are upstream boundaries, valency-1 heads are downstream
boundaries, everything else is an interior junction.  Classification is
always derived from the edge list, never user-asserted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

from .errors import (
    CycleDetected,
    Disconnected,
    FlowConservationViolated,
    InvalidNetwork,
    InvalidRobinPair,
    NonpositiveLength,
    UnknownPreset,
)

FLOW_TOL = 1e-12  # relative tolerance for junction flow conservation


class VertexClass(Enum):
    UPSTREAM = "upstream-boundary"
    DOWNSTREAM = "downstream-boundary"
    JUNCTION = "interior-junction"


class BCKind(Enum):
    ZERO_FLUX = "zero-flux"    # total flux D u_x - v u vanishes at the vertex
    FREE_FLOW = "free-flow"    # u_x = 0: advective outflow only
    HOSTILE = "hostile"        # u = 0
    ROBIN = "robin"            # general nonnegative (alpha, beta) pair


@dataclass(frozen=True)
class Vertex:
    id: int
    vclass: VertexClass
    hostile: bool = False


@dataclass(frozen=True)
class Edge:
    id: int
    tail: int      # vertex id at x = 0 (upstream end)
    head: int      # vertex id at x = l (downstream end)
    length: float  # m


@dataclass(frozen=True)
class EdgeParams:
    D: float          # diffusion, m^2/s
    v: float          # advection tail->head, m/s
    A: float          # wetted cross-section, m^2
    r: float          # recruitment rate, 1/s
    m: float          # mortality rate, 1/s
    K: float = 1.0    # carrying capacity, density units

    def validate(self, edge_id: int) -> None:
        if not (self.D > 0 and self.A > 0):
            raise InvalidNetwork(f"edge {edge_id}: D and A must be positive")
        if self.v < 0:
            raise InvalidNetwork(f"edge {edge_id}: advection must be >= 0")
        if self.r < 0 or self.m < 0:
            raise InvalidNetwork(f"edge {edge_id}: rates must be >= 0")
        if not self.K > 0:
            raise InvalidNetwork(f"edge {edge_id}: carrying capacity must be positive")


@dataclass(frozen=True)
class BoundaryCondition:
    """Robin pair at a boundary vertex, or one of the exact presets.

    The presets map to the pair (alpha, beta) as:
    zero-flux upstream -> (v, D); free-flow -> (0, 1); hostile -> (1, 0).
    Zero-flux at a downstream vertex with v > 0 has no nonnegative Robin
    representation, hence the explicit kind: assembly imposes the preset
    semantics exactly instead of going through the pair.
    """
    kind: BCKind
    alpha: float = 0.0
    beta: float = 0.0

    @classmethod
    def zero_flux(cls) -> "BoundaryCondition":
        return cls(BCKind.ZERO_FLUX)

    @classmethod
    def free_flow(cls) -> "BoundaryCondition":
        return cls(BCKind.FREE_FLOW, alpha=0.0, beta=1.0)

    @classmethod
    def hostile(cls) -> "BoundaryCondition":
        return cls(BCKind.HOSTILE, alpha=1.0, beta=0.0)

    @classmethod
    def robin(cls, alpha: float, beta: float) -> "BoundaryCondition":
        if alpha < 0 or beta < 0 or alpha + beta <= 0:
            raise InvalidRobinPair(
                f"need alpha >= 0, beta >= 0, alpha + beta > 0; got ({alpha}, {beta})"
            )
        return cls(BCKind.ROBIN, alpha=alpha, beta=beta)


@dataclass(frozen=True)
class RiverNetwork:
    """Validated oriented metric tree with per-edge parameters.

    Immutable after construction; all operations on it are pure.
    """
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]
    params: tuple[EdgeParams, ...]
    boundary: dict[int, BoundaryCondition]  # vertex id -> condition

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def incident_edges(self, vertex_id: int) -> list[Edge]:
        return [e for e in self.edges if e.tail == vertex_id or e.head == vertex_id]

    def d(self, vertex_id: int, edge_id: int) -> int:
        """Incidence entry: +1 head, -1 tail, 0 otherwise."""
        e = self.edges[edge_id]
        if e.head == vertex_id:
            return 1
        if e.tail == vertex_id:
            return -1
        return 0

    def valency(self, vertex_id: int) -> int:
        return len(self.incident_edges(vertex_id))

    def junctions(self) -> list[Vertex]:
        return [v for v in self.vertices if v.vclass is VertexClass.JUNCTION]

    def boundary_vertices(self) -> list[Vertex]:
        return [v for v in self.vertices if v.vclass is not VertexClass.JUNCTION]

    def upstream_vertices(self) -> list[Vertex]:
        return [v for v in self.vertices if v.vclass is VertexClass.UPSTREAM]

    def downstream_vertices(self) -> list[Vertex]:
        return [v for v in self.vertices if v.vclass is VertexClass.DOWNSTREAM]

    def validate(self) -> "RiverNetwork":
        """Re-run all construction checks; idempotent on a valid network."""
        return build_network(
            [v.id for v in self.vertices],
            [(e.tail, e.head, e.length) for e in self.edges],
            list(self.params),
            dict(self.boundary),
        )

    def with_params(self, params: list[EdgeParams]) -> "RiverNetwork":
        """Copy of the network with replaced edge parameters (revalidated)."""
        return build_network(
            [v.id for v in self.vertices],
            [(e.tail, e.head, e.length) for e in self.edges],
            list(params),
            dict(self.boundary),
        )


def build_network(vertex_ids, edge_defs, params, boundary) -> RiverNetwork:
    """Validate raw lists and derive vertex classes.

    vertex_ids: iterable of contiguous integer ids 0..n-1.
    edge_defs:  list of (tail, head, length) in edge-id order.
    params:     list of EdgeParams, one per edge.
    boundary:   dict vertex id -> BoundaryCondition, covering exactly the
                valency-1 vertices.
    """
    vertex_ids = list(vertex_ids)
    n = len(vertex_ids)
    if sorted(vertex_ids) != list(range(n)):
        raise InvalidNetwork("vertex ids must be contiguous 0..n-1")
    if len(edge_defs) != len(params):
        raise InvalidNetwork("need exactly one EdgeParams per edge")

    edges = []
    for j, (tail, head, length) in enumerate(edge_defs):
        if length <= 0 or not math.isfinite(length):
            raise NonpositiveLength(f"edge {j}: length {length}")
        if tail == head:
            raise CycleDetected(f"edge {j} is a self-loop at vertex {tail}")
        if tail not in range(n) or head not in range(n):
            raise InvalidNetwork(f"edge {j} references unknown vertex")
        edges.append(Edge(j, tail, head, float(length)))

    # connectivity first, then the tree edge count
    adjacency: dict[int, list[int]] = {i: [] for i in range(n)}
    for e in edges:
        adjacency[e.tail].append(e.head)
        adjacency[e.head].append(e.tail)
    seen = {0}
    stack = [0]
    while stack:
        for nb in adjacency[stack.pop()]:
            if nb not in seen:
                seen.add(nb)
                stack.append(nb)
    if len(seen) != n:
        raise Disconnected(f"only {len(seen)} of {n} vertices reachable")
    if len(edges) != n - 1:
        raise CycleDetected(f"{len(edges)} edges on {n} vertices cannot be a tree")

    for j, p in enumerate(params):
        p.validate(j)

    # derive vertex classes from valency and orientation
    tails = {e.tail for e in edges}
    heads = {e.head for e in edges}
    vertices = []
    for i in range(n):
        deg = sum(1 for e in edges if i in (e.tail, e.head))
        if deg == 1:
            vclass = VertexClass.UPSTREAM if i in tails else VertexClass.DOWNSTREAM
        else:
            vclass = VertexClass.JUNCTION
        vertices.append(Vertex(i, vclass))

    boundary = dict(boundary)
    for v in vertices:
        if v.vclass is VertexClass.JUNCTION:
            if v.id in boundary:
                raise InvalidNetwork(
                    f"vertex {v.id} is an interior junction; boundary conditions "
                    "apply only to valency-1 vertices"
                )
        elif v.id not in boundary:
            raise InvalidNetwork(f"boundary vertex {v.id} has no boundary condition")
    for vid, bc in boundary.items():
        if vid not in range(n):
            raise InvalidNetwork(f"boundary condition for unknown vertex {vid}")
        if bc.kind is BCKind.ROBIN:
            if bc.alpha < 0 or bc.beta < 0 or bc.alpha + bc.beta <= 0:
                raise InvalidRobinPair(f"vertex {vid}: ({bc.alpha}, {bc.beta})")
            if bc.beta == 0.0:
                # alpha u = 0 with alpha > 0 pins u: same as the hostile preset
                boundary[vid] = BoundaryCondition.hostile()

    vertices = [
        replace(v, hostile=(v.id in boundary and boundary[v.id].kind is BCKind.HOSTILE))
        for v in vertices
    ]

    net = RiverNetwork(tuple(vertices), tuple(edges), tuple(params), boundary)

    # Kirchhoff flow conservation at every junction
    for v in net.junctions():
        total = 0.0
        scale = 0.0
        for e in net.incident_edges(v.id):
            q = params[e.id].A * params[e.id].v
            total += net.d(v.id, e.id) * q
            scale += abs(q)
        if abs(total) > FLOW_TOL * max(scale, 1e-300):
            raise FlowConservationViolated(v.id, total)

    return net


# -- presets ----------------------------------------------------------------

# Topology tables: (edge tails/heads over symbolic vertex labels.)
# "u*" upstream boundaries, "d*" downstream boundaries, "J*" junctions.
# Edge order follows the k1..k7 branch numbering used throughout the docs.
_PRESET_EDGES = {
    "1":   [("u1", "d1")],
    "3-a": [("u1", "J1"), ("u2", "J1"), ("J1", "d1")],
    "3-b": [("u1", "J1"), ("J1", "d1"), ("J1", "d2")],
    "4-a": [("u1", "J1"), ("u2", "J1"), ("u3", "J1"), ("J1", "d1")],
    "4-b": [("u1", "J1"), ("J1", "d1"), ("J1", "d2"), ("J1", "d3")],
    "5-a": [("u1", "J1"), ("u2", "J1"), ("J1", "J2"), ("u3", "J2"), ("J2", "d1")],
    "5-b": [("u1", "J1"), ("J1", "d1"), ("J1", "J2"), ("J2", "d2"), ("J2", "d3")],
    "7-a": [("u1", "J1"), ("u2", "J1"), ("u3", "J2"), ("u4", "J2"),
            ("J1", "J3"), ("J2", "J3"), ("J3", "d1")],
    "7-b": [("u1", "J3"), ("J3", "J1"), ("J3", "J2"),
            ("J1", "d1"), ("J1", "d2"), ("J2", "d3"), ("J2", "d4")],
}

PRESET_NAMES = tuple(_PRESET_EDGES)


def preset_edge_count(name: str) -> int:
    if name not in _PRESET_EDGES:
        raise UnknownPreset(f"preset {name!r}")
    return len(_PRESET_EDGES[name])


@dataclass(frozen=True)
class SharedParams:
    """Parameters shared across a preset network.

    regime "A-fixed": every edge gets cross-section A; advection is v on the
    boundary-most edges (upstream edges of merging networks, downstream edges
    of splitting ones) and derived at junctions from flow conservation.
    regime "v-fixed": the mirror arrangement with A derived instead.
    """
    D: float
    r: float
    m: float
    K: float = 1.0
    v: float = 0.0015
    A: float = 1.0
    regime: str = "A-fixed"   # or "v-fixed"
    boundary: str = "ZF-FF"   # ZF-FF | ZF-H | H-H


def boundary_set(net_vertices, label: str) -> dict[int, BoundaryCondition]:
    """Boundary map for the standard labelled sets."""
    if label not in ("ZF-FF", "ZF-H", "H-H"):
        raise UnknownPreset(f"boundary set {label!r}")
    out = {}
    for v in net_vertices:
        if v.vclass is VertexClass.UPSTREAM:
            out[v.id] = (BoundaryCondition.hostile() if label == "H-H"
                         else BoundaryCondition.zero_flux())
        elif v.vclass is VertexClass.DOWNSTREAM:
            out[v.id] = (BoundaryCondition.free_flow() if label == "ZF-FF"
                         else BoundaryCondition.hostile())
    return out


def preset(name: str, branch_length: float, shared: SharedParams) -> RiverNetwork:
    """Standard test topologies with all branch lengths equal.

    Within each preset the boundary-most edges carry the base advection or
    cross-section value and the remaining edges are resolved junction by
    junction so that flow is conserved exactly.
    """
    if name not in _PRESET_EDGES:
        raise UnknownPreset(f"preset {name!r}; known: {', '.join(_PRESET_EDGES)}")
    sym_edges = _PRESET_EDGES[name]

    labels: list[str] = []
    for t, h in sym_edges:
        for lab in (t, h):
            if lab not in labels:
                labels.append(lab)
    idx = {lab: i for i, lab in enumerate(labels)}
    edge_defs = [(idx[t], idx[h], float(branch_length)) for t, h in sym_edges]

    n_edges = len(edge_defs)
    tails = {t for t, _, _ in edge_defs}
    heads = {h for _, h, _ in edge_defs}
    # Leaf-most edges carry the base value: a merging network ("-a") seeds its
    # upstream edges, a splitting one ("-b") its downstream edges; the single
    # branch is its own seed.
    merging = not name.endswith("b")
    seed = []
    for j, (t, h, _) in enumerate(edge_defs):
        deg_t = sum(1 for tt, hh, _ in edge_defs if t in (tt, hh))
        deg_h = sum(1 for tt, hh, _ in edge_defs if h in (tt, hh))
        if merging and deg_t == 1:
            seed.append(j)
        elif not merging and deg_h == 1:
            seed.append(j)

    if shared.regime == "A-fixed":
        A = [shared.A] * n_edges
        known = {j: shared.v for j in seed}
        derived = _resolve_conservation(edge_defs, [shared.A] * n_edges, known)
        v = [derived[j] for j in range(n_edges)]
    elif shared.regime == "v-fixed":
        v = [shared.v] * n_edges
        if shared.v == 0.0:
            # conservation is vacuous without advection
            A = [shared.A] * n_edges
        else:
            known = {j: shared.A for j in seed}
            derived = _resolve_conservation(edge_defs, [shared.v] * n_edges, known)
            A = [derived[j] for j in range(n_edges)]
    else:
        raise UnknownPreset(f"flow regime {shared.regime!r}")

    params = [EdgeParams(D=shared.D, v=v[j], A=A[j], r=shared.r, m=shared.m,
                         K=shared.K) for j in range(n_edges)]

    # provisional vertex classes just to assign boundary conditions
    provisional = []
    for lab, i in idx.items():
        deg = sum(1 for t, h, _ in edge_defs if i in (t, h))
        if deg == 1:
            vclass = (VertexClass.UPSTREAM if any(t == i for t, _, _ in edge_defs)
                      else VertexClass.DOWNSTREAM)
        else:
            vclass = VertexClass.JUNCTION
        provisional.append(Vertex(i, vclass))
    bmap = boundary_set(provisional, shared.boundary)

    return build_network(range(len(labels)), edge_defs, params, bmap)


def _resolve_conservation(edge_defs, weight, known: dict[int, float]) -> dict[int, float]:
    """Fill the unknown factor per edge so that sum d * weight * factor = 0.

    weight is the fixed factor (A in the A-fixed regime, v in the v-fixed
    one); known seeds the boundary-most edges.  Junctions with exactly one
    unresolved incident edge are solved repeatedly; on a tree this sweeps
    through the whole network.
    """
    n_vertices = 1 + max(max(t, h) for t, h, _ in edge_defs)
    incident: dict[int, list[tuple[int, int]]] = {i: [] for i in range(n_vertices)}
    for j, (t, h, _) in enumerate(edge_defs):
        incident[t].append((j, -1))
        incident[h].append((j, +1))

    values = dict(known)
    junctions = [i for i in range(n_vertices) if len(incident[i]) > 1]
    for _ in range(len(edge_defs) + 1):
        progress = False
        for i in junctions:
            unknown = [(j, d) for j, d in incident[i] if j not in values]
            if len(unknown) != 1:
                continue
            j0, d0 = unknown[0]
            balance = sum(d * weight[j] * values[j]
                          for j, d in incident[i] if j in values)
            values[j0] = -balance / (d0 * weight[j0])
            progress = True
        if not progress:
            break
    if len(values) != len(edge_defs):
        raise InvalidNetwork("could not resolve junction flow from seed edges")
    return values
