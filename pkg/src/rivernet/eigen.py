"""Principal eigenvalue and net reproductive rate solvers.

Both quantities come out of deterministic inverse power iterations on
positive matrices.  The growth-rate threshold lambda* is the dominant
eigenvalue of the discrete generator with potential c = r - m; shifting by
xi > max(c) and inverting gives a positive matrix whose Perron vector is
the positive eigenfunction.  The net reproductive rate R0 is the Perron
value of A^{-1} r_hat, where A discretizes mortality-plus-transport and
r_hat is the diagonal of recruitment samples; its Perron vector scaled by
r_hat is the next-generation distribution.

Convergence engineering: the spectral gaps of river-scale problems are of
order D/l^2 or v^2/D (around 1e-6 per second), so a shift margin must
live on that scale; anything of order one per second would leave inverse
iteration with a contraction ratio indistinguishable from 1.  The margin
starts at a small fraction of the operator's characteristic rate and, when
a problem converges slowly even so, the iteration restarts with the shift
retargeted just beyond the current eigenvalue estimate, which collapses
the contraction ratio.  A retargeted shift could in principle land past
the dominant eigenvalue; the Perron pair is the unique one with a positive
eigenvector, so positivity is verified at convergence and a conservative
single-shift pass is rerun if it ever failed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .discretize import DiscreteOperator, Grid, assemble, sample_on_nodes
from .errors import MortalityNotDominant, NoConvergence, SingularFactorization
from .graph import RiverNetwork

EIG_RTOL = 1e-12
MAX_ITER = 10_000
STAGE_ITERS = 150     # iterations between shift retargets
SHIFT_MARGIN = 1e-3   # of the characteristic rate; see shift_above()
ZERO_LAMBDA = 1e-14   # |lambda*| below this counts as the threshold itself
ZERO_R0 = 1e-10       # |R0 - 1| below this counts as the threshold itself


@dataclass(frozen=True)
class EigenOutcome:
    kind: str                 # "lambda-star" | "R0"
    value: float              # 1/s for lambda*, dimensionless for R0
    psi: np.ndarray           # eigenfunction, sup-normalized to 1, 0 at hostile nodes
    iterations: int
    residual: float           # last relative change of the eigenvalue estimate
    shift: float = 0.0        # final shift used by the inverse iteration
    phi: np.ndarray | None = None  # next-generation distribution (R0 only)


def characteristic_rate(network: RiverNetwork, c: np.ndarray) -> float:
    """Natural 1/s scale of the operator's upper spectrum.

    Combines each edge's slowest diffusive mode and advective decay with
    the spread of the potential.
    """
    per_edge = max(
        p.D * np.pi**2 / e.length**2 + p.v**2 / (4.0 * p.D)
        for e, p in zip(network.edges, network.params)
    )
    spread = float(np.max(c) - np.min(c)) if c.size else 0.0
    return max(per_edge, spread, 1e-300)


def shift_above(op: DiscreteOperator) -> float:
    """Initial shift strictly above the dominant eigenvalue of the generator.

    The Perron value never exceeds max(c) (flux rows have nonpositive row
    sums beyond the potential), so any positive margin makes (xi I - L)
    an M-matrix with positive inverse.
    """
    c_active = op.potential[op.active]
    rate = characteristic_rate(op.grid.network, c_active)
    return float(np.max(c_active)) + SHIFT_MARGIN * rate


def _restarted_inverse_power(build, eig_from, retarget, shift0, rhs_diag,
                             mask, n, scale_floor, allow_restarts=True):
    """Inverse power iteration with stagewise shift retargeting.

    build(shift) returns the matrix to factorize; each stage iterates
    y = M^{-1} (B w) with sup normalization, estimating the eigenvalue as
    eig_from(shift, rho) from the Rayleigh quotient rho.  When a stage
    ends unconverged, the next shift is placed a guarded distance beyond
    the current estimate.  Returns (value, vector, iterations, delta).
    """
    w = np.zeros(n)
    w[~mask] = 1.0
    shift = shift0
    lam = np.inf
    total = 0
    eps = np.finfo(float).eps

    while total < MAX_ITER:
        try:
            lu = spla.splu(build(shift).tocsc())
        except RuntimeError as exc:
            raise SingularFactorization(str(exc)) from exc
        delta_abs = np.inf
        prev_delta = np.inf
        for _ in range(min(STAGE_ITERS, MAX_ITER - total)):
            y = lu.solve(w if rhs_diag is None else rhs_diag * w)
            y[mask] = 0.0
            sup = np.max(np.abs(y))
            if not np.isfinite(sup) or sup == 0.0:
                raise SingularFactorization("inverse iteration produced no growth")
            rho = float(w @ y) / float(w @ w)
            lam_new = eig_from(shift, rho)
            total += 1
            prev_delta = delta_abs
            delta_abs = abs(lam_new - lam)
            lam = lam_new
            w = y / sup
            if delta_abs < EIG_RTOL * max(abs(lam), 1e-300):
                return lam, w, total, delta_abs / max(abs(lam), 1e-300)
        if not allow_restarts:
            continue
        # geometric tail estimate of the remaining error, with slack
        if np.isfinite(delta_abs) and np.isfinite(prev_delta) and prev_delta > 0:
            ratio = min(max(delta_abs / prev_delta, 0.0), 0.99999)
            err = delta_abs * ratio / (1.0 - ratio)
        else:
            err = abs(lam) if np.isfinite(lam) else scale_floor
        margin = max(4.0 * err, 64.0 * eps * (abs(lam) + abs(shift)),
                     1e-9 * scale_floor)
        shift = retarget(shift, lam, margin)

    raise NoConvergence(
        f"inverse power iteration not converged in {MAX_ITER} iterations "
        f"(last delta {delta_abs:.2e})",
        best=(lam, w),
        iterations=total,
        residual=delta_abs / max(abs(lam), 1e-300),
    )


def principal_eigenvalue(op: DiscreteOperator) -> EigenOutcome:
    """Dominant eigenvalue of the generator with its positive eigenfunction.

    Inverse power iteration on (xi I - L) with sup normalization; hostile
    nodes are pinned at zero throughout.  Converged when successive
    eigenvalue estimates agree to EIG_RTOL relatively.
    """
    L = op.matrix
    n = op.n
    active = op.active
    eye = sp.identity(n, format="csr")
    xi0 = shift_above(op)
    rate = characteristic_rate(op.grid.network, op.potential[active])

    def build(shift):
        return eye * shift - L

    def eig_from(shift, rho):
        return shift - 1.0 / rho

    def retarget(shift, lam, margin):
        return min(shift, lam + margin)

    for conservative in (False, True):
        lam, w, iters, res = _restarted_inverse_power(
            build, eig_from, retarget, xi0, None, op.hostile_mask, n, rate,
            allow_restarts=not conservative)
        psi = _positive(w, active)
        if np.all(psi[active] > 0.0):
            return EigenOutcome("lambda-star", lam, psi, iters, res, shift=xi0)
    raise NoConvergence(
        "inverse iteration settled on a sign-changing vector", best=(lam, w),
        iterations=iters, residual=res)


def net_reproductive_rate(network: RiverNetwork, grid: Grid) -> EigenOutcome:
    """R0 as the Perron value of the discrete next-generation operator.

    Requires the mortality-only system to be subcritical (its growth bound
    negative), which is checked first; then iterates
    y = (A - sigma r_hat)^{-1} (r_hat w), the generalized shift-invert
    form of A psi = mu r_hat psi, and reports R0 = 1 / mu.
    """
    r_nodes = sample_on_nodes(grid, [p.r for p in network.params])
    m_nodes = sample_on_nodes(grid, [p.m for p in network.params])
    if not np.any(r_nodes > 0):
        raise MortalityNotDominant("recruitment must be positive somewhere")

    op_B = assemble(network, grid, potential=-m_nodes)
    sB = principal_eigenvalue(op_B)
    # a roundoff-scale bound counts as zero: the inverse would be singular
    floor = 1e-12 * characteristic_rate(network, -m_nodes[op_B.active])
    if sB.value >= -floor:
        raise MortalityNotDominant(
            f"mortality-only growth bound is {sB.value:.3e}; "
            "it must be negative for the next-generation operator to exist"
        )

    A = (-op_B.matrix).tocsr()   # hostile rows become +identity
    active = op_B.active
    r_hat = r_nodes.copy()
    r_hat[op_B.hostile_mask] = 0.0
    R = sp.diags(r_hat, format="csr")

    def build(sigma):
        return A - sigma * R

    def eig_from(sigma, rho):
        return sigma + 1.0 / rho   # the generalized eigenvalue mu

    def retarget(sigma, mu, margin):
        return max(sigma, mu - margin)

    for conservative in (False, True):
        mu, w, iters, res = _restarted_inverse_power(
            build, eig_from, retarget, 0.0, r_hat, op_B.hostile_mask, op_B.n,
            1.0, allow_restarts=not conservative)
        psi = _positive(w, active)
        if np.all(psi[active] > 0.0) and mu > 0:
            phi = r_hat * psi
            phi /= np.max(np.abs(phi))
            return EigenOutcome("R0", 1.0 / mu, psi, iters, res, shift=0.0,
                                phi=phi)
    raise NoConvergence(
        "next-generation iteration settled on a sign-changing vector",
        best=(mu, w), iterations=iters, residual=res)


@dataclass(frozen=True)
class SignReport:
    lambda_star: float
    R0: float
    consistent: bool


def sign_consistency(network: RiverNetwork, grid: Grid) -> SignReport:
    """Check that R0 - 1 and lambda* agree in sign (threshold equivalence)."""
    c = sample_on_nodes(grid, [p.r - p.m for p in network.params])
    lam = principal_eigenvalue(assemble(network, grid, potential=c))
    r0 = net_reproductive_rate(network, grid)

    def sgn(x: float, tol: float) -> int:
        if abs(x) < tol:
            return 0
        return 1 if x > 0 else -1

    consistent = sgn(r0.value - 1.0, ZERO_R0) == sgn(lam.value, ZERO_LAMBDA)
    return SignReport(lambda_star=lam.value, R0=r0.value, consistent=consistent)


def growth_potential(network: RiverNetwork, grid: Grid) -> np.ndarray:
    """Per-node linearized growth rate c = r - m."""
    return sample_on_nodes(grid, [p.r - p.m for p in network.params])


def _positive(w: np.ndarray, active: np.ndarray) -> np.ndarray:
    """Sup-normalize and orient the eigenvector positively."""
    out = w.copy()
    if out[active].sum() < 0:
        out = -out
    out /= np.max(np.abs(out))
    return out
