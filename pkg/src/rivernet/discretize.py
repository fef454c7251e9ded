"""Finite-volume discretization of D u_xx - v u_x + c(x) u on a metric tree.

Every graph vertex owns exactly one unknown shared by all incident edges,
which builds the density-continuity condition into the grid; edge-interior
nodes own one unknown each.  Control volumes are the half-open cells around
each node, and a junction's control volume is the union of the incident
half-cells weighted by each edge's own wetted area.  The row of the
operator at a junction is the total-flux balance over that composite
volume, so zero total flux through the junction holds by construction and
the scheme is conservative: with zero-flux boundaries the weighted column
sums of the operator vanish to machine precision.

Face fluxes are hybrid central/upwind.  A face uses the central average
while its Peclet number v*h/(2D) stays below one and switches to the
upwind value beyond, which keeps all off-diagonal entries of the generator
nonnegative.  That sign structure is what makes shifted inverses positive
and power iteration on them converge to the positive principal pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .graph import BCKind, RiverNetwork, VertexClass

PECLET_SWITCH = 1.0


@dataclass(frozen=True)
class Grid:
    """Per-edge uniform grids glued at shared vertex unknowns."""
    network: RiverNetwork
    cells: tuple[int, ...]                  # N_j cells on edge j
    spacing: tuple[float, ...]              # h_j = l_j / N_j, m
    n_nodes: int
    interior_offset: tuple[int, ...]        # global id of each edge's first interior node

    def node(self, edge_id: int, k: int) -> int:
        """Global index of node k (0..N_j) on the given edge."""
        e = self.network.edges[edge_id]
        if k == 0:
            return e.tail
        if k == self.cells[edge_id]:
            return e.head
        return self.interior_offset[edge_id] + (k - 1)

    def edge_nodes(self, edge_id: int) -> np.ndarray:
        """Global indices of all nodes along an edge, tail to head."""
        e = self.network.edges[edge_id]
        N = self.cells[edge_id]
        out = np.empty(N + 1, dtype=np.int64)
        out[0] = e.tail
        out[-1] = e.head
        out[1:-1] = self.interior_offset[edge_id] + np.arange(N - 1)
        return out

    def positions(self, edge_id: int) -> np.ndarray:
        """Arc-length coordinates of an edge's nodes, in m."""
        h = self.spacing[edge_id]
        return h * np.arange(self.cells[edge_id] + 1)


def build_grid(network: RiverNetwork, target_h: float) -> Grid:
    """Choose N_j = ceil(l_j / target_h) cells per edge, at least 2."""
    if target_h <= 0:
        raise ValueError("target_h must be positive")
    cells = []
    spacing = []
    for e in network.edges:
        n = max(2, int(np.ceil(e.length / target_h - 1e-12)))
        cells.append(n)
        spacing.append(e.length / n)
    offsets = []
    base = network.n_vertices
    for n in cells:
        offsets.append(base)
        base += n - 1
    return Grid(network, tuple(cells), tuple(spacing), base, tuple(offsets))


@dataclass(frozen=True)
class DiscreteOperator:
    """Generator matrix, control-volume weights, and potential samples.

    matrix is the CSR form of the discrete generator L: du/dt = L u.  Rows
    of hostile boundary nodes are replaced by the decoupled equation u = 0
    (diagonal -1); hostile_mask marks them so solvers can pin those nodes.
    weights[i] is the product of wetted area and control-volume length at
    node i, in m^3, summing the incident half-cells at vertices.
    """
    matrix: sp.csr_matrix
    weights: np.ndarray
    potential: np.ndarray
    grid: Grid
    hostile_mask: np.ndarray = field(repr=False, default=None)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def active(self) -> np.ndarray:
        """Indices of non-hostile nodes."""
        return np.flatnonzero(~self.hostile_mask)


def sample_on_nodes(grid: Grid, per_edge: np.ndarray | list[float]) -> np.ndarray:
    """Spread per-edge values onto grid nodes.

    Edge-interior nodes take their edge's value; a vertex takes the
    half-cell-volume weighted average of its incident edges, which is the
    value the composite control volume integrates against.
    """
    net = grid.network
    per_edge = np.asarray(per_edge, dtype=float)
    out = np.zeros(grid.n_nodes)
    wsum = np.zeros(net.n_vertices)
    for e in net.edges:
        nodes = grid.edge_nodes(e.id)
        out[nodes[1:-1]] = per_edge[e.id]
        w = net.params[e.id].A * grid.spacing[e.id] / 2.0
        for vid in (e.tail, e.head):
            out[vid] += w * per_edge[e.id]
            wsum[vid] += w
    out[:net.n_vertices] /= wsum
    return out


def _face_coeffs(D: float, v: float, h: float) -> tuple[float, float]:
    """Coefficients (a, b) of the face flux F = a*u_left + b*u_right.

    F approximates v*u - D*u_x at the face between two adjacent nodes.
    Central averaging below the Peclet threshold, upwind (left, since
    v >= 0 points tail to head) above it.
    """
    if D > 0 and v * h / (2.0 * D) < PECLET_SWITCH:
        return v / 2.0 + D / h, v / 2.0 - D / h
    return v + D / h, -D / h


def assemble(network: RiverNetwork, grid: Grid,
             potential: np.ndarray | float = 0.0) -> DiscreteOperator:
    """Build the discrete generator with the given per-node potential c."""
    n = grid.n_nodes
    if np.isscalar(potential):
        c = np.full(n, float(potential))
    else:
        c = np.asarray(potential, dtype=float)
        if c.shape != (n,):
            raise ValueError(f"potential must have {n} entries")

    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    vals: list[np.ndarray] = []

    def add(i, j, x) -> None:
        rows.append(np.atleast_1d(np.asarray(i, dtype=np.int64)))
        cols.append(np.atleast_1d(np.asarray(j, dtype=np.int64)))
        vals.append(np.atleast_1d(np.asarray(x, dtype=float)))

    weights = np.zeros(n)
    hostile = np.zeros(n, dtype=bool)
    for v in network.vertices:
        hostile[v.id] = v.hostile

    for e in network.edges:
        p = network.params[e.id]
        h = grid.spacing[e.id]
        N = grid.cells[e.id]
        nodes = grid.edge_nodes(e.id)
        a, b = _face_coeffs(p.D, p.v, h)

        weights[nodes[1:-1]] += p.A * h
        weights[nodes[0]] += p.A * h / 2.0
        weights[nodes[-1]] += p.A * h / 2.0

        # interior rows: (F_left - F_right)/h
        inner = nodes[1:-1]
        add(inner, nodes[:-2], np.full(N - 1, a / h))
        add(inner, inner, np.full(N - 1, (b - a) / h))
        add(inner, nodes[2:], np.full(N - 1, -b / h))

        # vertex rows: per-area flux through the first/last interior face,
        # scaled later by A_j / w_vertex
        tail, head = nodes[0], nodes[-1]
        if not hostile[tail]:
            # CV gains -F_0 through the face between nodes 0 and 1
            add(tail, tail, -p.A * a)
            add(tail, nodes[1], -p.A * b)
            if network.vertices[e.tail].vclass is VertexClass.UPSTREAM:
                add(tail, tail, p.A * _boundary_flux_coeff(network, e.tail, p.D, p.v))
        if not hostile[head]:
            # CV gains +F_{N-1} through the face between nodes N-1 and N
            add(head, nodes[-2], p.A * a)
            add(head, head, p.A * b)
            if network.vertices[e.head].vclass is VertexClass.DOWNSTREAM:
                add(head, head, -p.A * _boundary_flux_coeff(network, e.head, p.D, p.v))

    M = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n, n),
    )

    # vertex rows accumulated raw flux sums; divide by the composite volume
    scale = np.ones(n)
    for v in network.vertices:
        scale[v.id] = 1.0 / weights[v.id]
    M = sp.diags(scale) @ M
    M = M + sp.diags(c)
    M = M.tolil()
    for v in network.vertices:
        if hostile[v.id]:
            M.rows[v.id] = [v.id]
            M.data[v.id] = [-1.0]
    M = M.tocsr()
    c = c.copy()
    c[hostile] = 0.0

    return DiscreteOperator(matrix=M, weights=weights, potential=c,
                            grid=grid, hostile_mask=hostile)


def _boundary_flux_coeff(network: RiverNetwork, vertex_id: int,
                         D: float, v: float) -> float:
    """Coefficient g with boundary-face flux F = g * u at a boundary vertex.

    The flux is oriented in +x; the caller applies the incidence sign.  The
    zero-flux preset zeroes the total flux exactly, free flow keeps the
    advective part only, and a Robin pair (alpha, beta) eliminates u_x
    through the boundary condition.
    """
    bc = network.boundary[vertex_id]
    upstream = network.vertices[vertex_id].vclass is VertexClass.UPSTREAM
    if bc.kind is BCKind.ZERO_FLUX:
        return 0.0
    if bc.kind is BCKind.FREE_FLOW:
        return v
    if bc.kind is BCKind.ROBIN:
        if bc.beta == 0.0:
            # Dirichlet-form pair: handled as a hostile row upstream of here
            return 0.0
        ratio = bc.alpha / bc.beta
        # upstream: u_x = (alpha/beta) u; downstream: u_x = -(alpha/beta) u
        return v - D * ratio if upstream else v + D * ratio
    raise AssertionError(f"hostile vertex {vertex_id} has no flux row")


@dataclass(frozen=True)
class SymmetrizationWeights:
    """Per-edge exponential weights making the transport part self-adjoint.

    p_j(x) = eta_j * exp(-v_j x / D_j) and zeta_j = p_j / D_j; the constants
    eta_j are fixed (up to one global factor) by requiring that at every
    junction the ratios p_j(e) : p_h(e) equal A_j D_j : A_h D_h.
    """
    eta: np.ndarray                 # one constant per edge
    p: tuple[np.ndarray, ...]       # samples along each edge's nodes
    zeta: tuple[np.ndarray, ...]    # p / D samples


def symmetrization_weights(network: RiverNetwork,
                           grid: Grid | None = None) -> SymmetrizationWeights:
    """Resolve the eta recursion over the tree and sample p, zeta.

    The lowest-id edge gets eta = 1; a breadth-first sweep over junctions
    then fixes every other edge from the ratio condition.  Any other root
    choice rescales all eta uniformly, which never matters because only
    ratios enter.
    """
    net = network
    eta = np.full(net.n_edges, np.nan)
    eta[0] = 1.0

    def p_at(edge_id: int, vertex_id: int) -> float:
        e = net.edges[edge_id]
        par = net.params[edge_id]
        x = e.length if e.head == vertex_id else 0.0
        return eta[edge_id] * np.exp(-par.v * x / par.D)

    queue = [net.edges[0].tail, net.edges[0].head]
    visited_vertices = set()
    while queue:
        vid = queue.pop(0)
        if vid in visited_vertices:
            continue
        visited_vertices.add(vid)
        incident = net.incident_edges(vid)
        known = [e for e in incident if not np.isnan(eta[e.id])]
        if not known:
            continue
        ref = known[0]
        ref_ad = net.params[ref.id].A * net.params[ref.id].D
        ref_p = p_at(ref.id, vid)
        for e in incident:
            if not np.isnan(eta[e.id]):
                continue
            par = net.params[e.id]
            target_p = ref_p * (par.A * par.D) / ref_ad
            x = e.length if e.head == vid else 0.0
            eta[e.id] = target_p * np.exp(par.v * x / par.D)
            queue.append(e.tail if e.head == vid else e.head)

    if grid is None:
        xs = [np.array([0.0, e.length]) for e in net.edges]
    else:
        xs = [grid.positions(e.id) for e in net.edges]
    p = tuple(eta[j] * np.exp(-net.params[j].v * xs[j] / net.params[j].D)
              for j in range(net.n_edges))
    zeta = tuple(p[j] / net.params[j].D for j in range(net.n_edges))
    return SymmetrizationWeights(eta=eta, p=p, zeta=zeta)


def selfadjoint_scaling(op: DiscreteOperator) -> np.ndarray:
    """Diagonal W with W @ L approximately symmetric.

    Interior nodes of edge j get h_j * zeta_j(x); a vertex gets
    w_vertex * zeta_j(e) / A_j, which the eta recursion makes independent
    of the incident edge chosen.  Exact symmetry for pure diffusion;
    O(h^2) asymmetry on central-advection rows and O(h) at junction rows.
    """
    grid = op.grid
    net = grid.network
    sym = symmetrization_weights(net, grid)
    W = np.zeros(op.n)
    for e in net.edges:
        nodes = grid.edge_nodes(e.id)
        h = grid.spacing[e.id]
        W[nodes[1:-1]] = h * sym.zeta[e.id][1:-1]
    for v in net.vertices:
        e = net.incident_edges(v.id)[0]
        zeta_e = sym.zeta[e.id][-1] if e.head == v.id else sym.zeta[e.id][0]
        W[v.id] = op.weights[v.id] * zeta_e / net.params[e.id].A
    return W
