"""Time integration of the nonlinear transport-growth system and its
positive steady state.

The reaction is logistic per edge, g(u) = (r (1 - u/K) - m) u, entering
the theta-scheme implicitly through Newton with the exact diagonal
Jacobian.  Backward Euler (theta = 1) is the default for its positivity
robustness; theta = 0.5 is available for accuracy studies.  The steady
state is found by damped Newton on the stationary residual, falling back
to pseudo-transient continuation when the Newton basin is missed; when
the dominant growth rate is nonpositive the population dies out and the
distinct Extinct outcome is returned instead of a zero field.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .discretize import DiscreteOperator, Grid, assemble, sample_on_nodes
from .eigen import characteristic_rate, growth_potential, principal_eigenvalue
from .errors import NewtonDiverged, NoConvergence, PositivityViolated
from .graph import RiverNetwork

NEWTON_TOL = 1e-10      # max-norm residual for a time step
NEWTON_MAX = 20
UNDERSHOOT = 1e-12      # clamp window for roundoff-negative densities
STEADY_RTOL = 1e-12     # times max(r), for the stationary residual


@dataclass(frozen=True)
class FieldState:
    """Population density on the global grid at one time instant."""
    values: np.ndarray   # density units, >= 0, exactly 0 at hostile nodes
    time: float          # s


@dataclass(frozen=True)
class GrowthModel:
    """Per-edge logistic growth: per-capita rate r (1 - u/K) - m."""
    r: np.ndarray   # 1/s
    m: np.ndarray   # 1/s
    K: np.ndarray   # density units

    @classmethod
    def from_network(cls, network: RiverNetwork) -> "GrowthModel":
        return cls(
            r=np.array([p.r for p in network.params]),
            m=np.array([p.m for p in network.params]),
            K=np.array([p.K for p in network.params]),
        )

    def node_rates(self, grid: Grid) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (
            sample_on_nodes(grid, self.r),
            sample_on_nodes(grid, self.m),
            sample_on_nodes(grid, self.K),
        )


@dataclass(frozen=True)
class Extinct:
    """Outcome of steady_state when the zero state attracts everything."""
    lambda_star: float


def _reaction(u, r, m, K):
    return (r * (1.0 - u / K) - m) * u


def _reaction_slope(u, r, m, K):
    return r - m - 2.0 * r * u / K


def step(state: FieldState, op: DiscreteOperator, growth: GrowthModel,
         dt: float, theta: float = 1.0) -> FieldState:
    """One implicit theta-scheme step of du/dt = L u + g(u).

    op must be assembled without potential; the full reaction enters
    through growth.  Newton stops when the step residual max-norm falls
    below 1e-10 (or its roundoff floor); hostile nodes stay pinned at 0.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if not 0.5 <= theta <= 1.0:
        raise ValueError("theta must lie in [0.5, 1]")

    grid = op.grid
    r, m, K = growth.node_rates(grid)
    L = op.matrix
    mask = op.hostile_mask
    u = state.values

    explicit = L @ u + _reaction(u, r, m, K)
    explicit[mask] = 0.0

    floor = _residual_floor(op, float(np.max(np.abs(u))), dt=dt)
    tol = max(NEWTON_TOL, floor)

    unew = u.copy()
    eye = sp.identity(op.n, format="csr")
    for _ in range(NEWTON_MAX):
        g = _reaction(unew, r, m, K)
        resid = unew - u - dt * (theta * (L @ unew + g) + (1 - theta) * explicit)
        resid[mask] = unew[mask]
        jac = eye - (dt * theta) * (L + sp.diags(_reaction_slope(unew, r, m, K)))
        jac = _pin_rows(jac, mask)
        delta = spla.splu(jac.tocsc()).solve(-resid)
        unew = unew + delta
        unew[mask] = 0.0

        g = _reaction(unew, r, m, K)
        resid = unew - u - dt * (theta * (L @ unew + g) + (1 - theta) * explicit)
        resid[mask] = 0.0
        if np.max(np.abs(resid)) < tol:
            break
    else:
        raise NewtonDiverged(
            f"time step Newton stalled at residual {np.max(np.abs(resid)):.3e}"
        )

    low = unew.min()
    if low < -UNDERSHOOT:
        raise PositivityViolated(f"density undershoot {low:.3e} at t={state.time + dt}")
    np.clip(unew, 0.0, None, out=unew)
    return FieldState(values=unew, time=state.time + dt)


def simulate(u0: FieldState, op: DiscreteOperator, growth: GrowthModel,
             t_end: float, dt: float, theta: float = 1.0,
             sample_times: list[float] | None = None) -> list[FieldState]:
    """March the theta scheme to t_end, recording at the sample times.

    Sample times snap to the nearest completed step; the initial state and
    the final state are always included.  Deterministic.
    """
    n_steps = int(np.ceil((t_end - u0.time) / dt - 1e-12))
    wanted = sorted(set(sample_times)) if sample_times else []
    out = [u0]
    state = u0
    next_sample = 0
    while next_sample < len(wanted) and wanted[next_sample] <= u0.time:
        next_sample += 1
    for _ in range(n_steps):
        state = step(state, op, growth, dt, theta)
        while (next_sample < len(wanted)
               and wanted[next_sample] <= state.time + 1e-9 * dt):
            out.append(state)
            next_sample += 1
    if out[-1] is not state and n_steps > 0:
        out.append(state)
    return out


def steady_state(network: RiverNetwork, grid: Grid,
                 growth: GrowthModel | None = None):
    """Positive steady state, or Extinct when the growth bound is <= 0.

    Newton on the stationary residual L u + g(u) = 0 from the per-edge
    logistic equilibrium guess; pseudo-transient continuation (backward
    Euler with a growing step) recovers the Newton basin when the direct
    solve fails or lands on the trivial state.
    """
    growth = growth or GrowthModel.from_network(network)
    lam = principal_eigenvalue(
        assemble(network, grid, potential=growth_potential(network, grid)))
    if lam.value <= 0:
        return Extinct(lambda_star=lam.value)

    op = assemble(network, grid, potential=0.0)
    r, m, K = growth.node_rates(grid)
    mask = op.hostile_mask

    guess_edge = [p.K * max(0.0, 1.0 - p.m / p.r) if p.r > 0 else 0.0
                  for p in network.params]
    u = sample_on_nodes(grid, guess_edge)
    u[mask] = 0.0

    tol = max(STEADY_RTOL * float(np.max(r)), _residual_floor(op, float(np.max(u))))
    u_newton = _steady_newton(op, u, r, m, K, tol)
    if u_newton is not None and _positive_enough(u_newton, mask, K):
        return FieldState(values=u_newton, time=np.inf)

    # pseudo-transient continuation: march with growing dt, then re-polish
    rate = characteristic_rate(network, op.potential + (r - m))
    dt = 0.05 / rate
    state = FieldState(values=np.maximum(u, 1e-6 * np.max(K)), time=0.0)
    state = FieldState(values=np.where(mask, 0.0, state.values), time=0.0)
    for _ in range(400):
        try:
            state = step(state, op, growth, dt)
        except NewtonDiverged:
            dt *= 0.25
            continue
        dt *= 1.6
        u_newton = _steady_newton(op, state.values, r, m, K, tol)
        if u_newton is not None and _positive_enough(u_newton, mask, K):
            return FieldState(values=u_newton, time=np.inf)
    raise NoConvergence("steady state iteration failed to converge")


def total_mass(state: FieldState, op: DiscreteOperator) -> float:
    """Volume integral of the density: sum of w_i u_i, in m^3 * density."""
    return float(op.weights @ state.values)


def _steady_newton(op, u0, r, m, K, tol, max_iter=60):
    """Damped Newton for L u + g(u) = 0; returns None on failure."""
    L = op.matrix
    mask = op.hostile_mask

    def resid(u):
        out = L @ u + _reaction(u, r, m, K)
        out[mask] = 0.0
        return out

    u = u0.copy()
    f = resid(u)
    fnorm = np.max(np.abs(f))
    for _ in range(max_iter):
        if fnorm < tol:
            return u
        jac = L + sp.diags(_reaction_slope(u, r, m, K))
        jac = _pin_rows(jac, mask)
        try:
            delta = spla.splu(jac.tocsc()).solve(-f)
        except RuntimeError:
            return None
        s = 1.0
        while s > 2.0**-30:
            trial = u + s * delta
            trial[mask] = 0.0
            ftrial = resid(trial)
            if np.max(np.abs(ftrial)) < (1.0 - 1e-4 * s) * fnorm:
                u, f = trial, ftrial
                fnorm = np.max(np.abs(f))
                break
            s *= 0.5
        else:
            return None
    return None


def _positive_enough(u, mask, K):
    """Strict positivity off the hostile set, at a meaningful amplitude."""
    free = ~mask
    if not np.all(u[free] > 0.0):
        return False
    return np.max(u[free]) > 1e-8 * np.max(K)


def _pin_rows(matrix: sp.spmatrix, mask: np.ndarray) -> sp.csr_matrix:
    """Replace the masked rows by identity rows."""
    if not mask.any():
        return matrix.tocsr()
    out = matrix.tolil()
    for i in np.flatnonzero(mask):
        out.rows[i] = [int(i)]
        out.data[i] = [1.0]
    return out.tocsr()


def _residual_floor(op: DiscreteOperator, amplitude: float,
                    dt: float | None = None) -> float:
    """Roundoff floor for residual norms.

    The stationary residual L u + g(u) carries cancellation noise of order
    eps times the operator row scale; a time-step residual scales that by
    dt and adds the O(1) identity part.
    """
    row_scale = float(np.max(np.abs(op.matrix).sum(axis=1)))
    scale = 1.0 + dt * row_scale if dt is not None else row_scale
    return 64.0 * np.finfo(float).eps * scale * max(amplitude, 1.0)
