"""Independent ground-truth machinery for validating the main solvers.

A tree-structured matrix whose paired off-diagonal entries agree in sign
can be rescaled symmetric by a diagonal similarity, after which a dense
Jacobi sweep delivers its full (real) spectrum.  That route shares nothing
with the power-iteration solver beyond the assembled matrix itself, so
agreement between the two is a strong check.  Closed-form expressions for
hostile-hostile intervals validate the assembly independently of both.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import (
    NoConvergence,
    NotATree,
    SignMismatch,
    UnsupportedBoundaryCombination,
)

JACOBI_OFF_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100


@dataclass(frozen=True)
class SymmetrizedSystem:
    """Symmetric similarity transform S = T M T^{-1} with T = diag(t)."""
    S: np.ndarray
    scaling: np.ndarray


def symmetrize_tree_matrix(M) -> SymmetrizedSystem:
    """Diagonal similarity turning a tree-sparse matrix symmetric.

    Walks the sparsity tree breadth-first from node 0 (per connected
    component), setting t_child = t_parent * sqrt(M[p,c] / M[c,p]); then
    S[i,j] = t_i M[i,j] / t_j = sqrt(M[i,j] M[j,i]) off the diagonal.
    """
    A = sp.csr_matrix(M)
    n = A.shape[0]
    if A.shape[0] != A.shape[1]:
        raise ValueError("matrix must be square")

    dense = A.toarray()
    pairs: dict[int, list[int]] = {i: [] for i in range(n)}
    for i, j in zip(*np.nonzero(dense)):
        if i == j:
            continue
        if dense[j, i] == 0.0 or dense[i, j] * dense[j, i] <= 0.0:
            raise SignMismatch(
                f"off-diagonal pair ({i},{j}) has nonpositive product: "
                f"{dense[i, j]!r} * {dense[j, i]!r}"
            )
        pairs[i].append(j)

    t = np.zeros(n)
    visited = np.zeros(n, dtype=bool)
    n_components = 0
    for root in range(n):
        if visited[root]:
            continue
        n_components += 1
        t[root] = 1.0
        visited[root] = True
        queue = [root]
        while queue:
            p = queue.pop(0)
            for ch in pairs[p]:
                if visited[ch]:
                    continue
                t[ch] = t[p] * np.sqrt(dense[p, ch] / dense[ch, p])
                visited[ch] = True
                queue.append(ch)

    # a forest has exactly n - n_components undirected adjacency pairs
    n_pairs = sum(len(v) for v in pairs.values()) // 2
    if n_pairs != n - n_components:
        raise NotATree("sparsity graph contains a cycle")

    S = (t[:, None] * dense) / t[None, :]
    return SymmetrizedSystem(S=S, scaling=t)


def _round_robin_rounds(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Tournament schedule covering every index pair exactly once per sweep.

    Rounds pair up disjoint indices, so all rotations of one round commute
    and can be applied simultaneously; n-1 (or n) rounds make a full sweep.
    """
    m = n + (n % 2)  # add a bye slot when n is odd
    rounds = []
    others = list(range(1, m))
    for _ in range(m - 1):
        arr = [0] + others
        P = np.array([arr[i] for i in range(m // 2)])
        Q = np.array([arr[m - 1 - i] for i in range(m // 2)])
        keep = (P < n) & (Q < n)
        rounds.append((P[keep], Q[keep]))
        others = others[1:] + others[:1]
    return rounds


def dense_symmetric_eigs(S: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """All eigenvalues (ascending) and eigenvectors by cyclic Jacobi.

    Sweeps rotate away every off-diagonal pair once, in round-robin order
    (disjoint pairs per round are applied together, which vectorizes the
    classic element-by-element cycle without changing its result), until
    the off-diagonal Frobenius mass falls below 1e-14 of the matrix norm.
    Returns (eigenvalues, column eigenvectors).
    """
    A = np.array(S, dtype=float)
    n = A.shape[0]
    defect = np.max(np.abs(A - A.T)) if n else 0.0
    scale = np.max(np.abs(A)) if n else 0.0
    if scale and defect > 1e-8 * scale:
        raise ValueError(f"matrix is not symmetric (defect {defect:.3e})")
    A = 0.5 * (A + A.T)
    V = np.eye(n)
    norm = np.linalg.norm(A)
    if norm == 0.0 or n == 1:
        return np.diag(A).copy(), V

    rounds = _round_robin_rounds(n)
    for _ in range(JACOBI_MAX_SWEEPS):
        offmat = A - np.diag(np.diag(A))
        off = np.linalg.norm(offmat)
        if off <= JACOBI_OFF_TOL * norm:
            order = np.argsort(np.diag(A), kind="stable")
            return np.diag(A)[order].copy(), V[:, order].copy()
        for P, Q in rounds:
            apq = A[P, Q]
            act = np.abs(apq) > 0.0
            if not np.any(act):
                continue
            P, Q, apq = P[act], Q[act], apq[act]
            theta = (A[Q, Q] - A[P, P]) / (2.0 * apq)
            tpar = np.sign(theta) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
            tpar[theta == 0.0] = 1.0  # sign(0) = 0 would stall the rotation
            cos = 1.0 / np.sqrt(tpar * tpar + 1.0)
            sin = tpar * cos

            rp = A[P, :].copy()
            A[P, :] = cos[:, None] * rp - sin[:, None] * A[Q, :]
            A[Q, :] = sin[:, None] * rp + cos[:, None] * A[Q, :]
            cp = A[:, P].copy()
            A[:, P] = cos[None, :] * cp - sin[None, :] * A[:, Q]
            A[:, Q] = sin[None, :] * cp + cos[None, :] * A[:, Q]
            A[P, Q] = 0.0
            A[Q, P] = 0.0

            vp = V[:, P].copy()
            V[:, P] = cos[None, :] * vp - sin[None, :] * V[:, Q]
            V[:, Q] = sin[None, :] * vp + cos[None, :] * V[:, Q]
    raise NoConvergence(
        f"Jacobi sweep limit {JACOBI_MAX_SWEEPS} reached (off mass {off:.2e})"
    )


def interval_lambda_star(D: float, v: float, c: float, L: float,
                         bc: str = "H-H") -> float:
    """Closed-form dominant growth rate on a hostile-hostile interval.

    lambda* = c - v^2/(4D) - D pi^2 / L^2; other boundary presets have
    transcendental eigenconditions and are not covered here.
    """
    if bc != "H-H":
        raise UnsupportedBoundaryCombination(
            f"closed form only exists for hostile-hostile; got {bc!r}"
        )
    return c - v * v / (4.0 * D) - D * np.pi**2 / L**2


def interval_R0(D: float, v: float, r: float, m: float, L: float,
                bc: str = "H-H") -> float:
    """Closed-form net reproductive rate on a hostile-hostile interval."""
    if bc != "H-H":
        raise UnsupportedBoundaryCombination(
            f"closed form only exists for hostile-hostile; got {bc!r}"
        )
    return r / (m + v * v / (4.0 * D) + D * np.pi**2 / L**2)


def lambda_star_dense(op) -> tuple[float, np.ndarray]:
    """lambda* and eigenvector via symmetrization + full dense spectrum.

    Restricts the shifted matrix (xi I - L) to the non-hostile block (the
    hostile identity rows would break the sign-pair requirement), computes
    the smallest eigenvalue there, and undoes shift and scaling.  Validates
    the power-iteration route end to end without sharing any of it.
    """
    from .eigen import shift_above  # local import to avoid a cycle

    L = op.matrix
    active = op.active
    xi = shift_above(op)
    shifted = (sp.identity(op.n, format="csr") * xi - L).tocsr()
    sub = shifted[np.ix_(active, active)]

    system = symmetrize_tree_matrix(sub)
    eigvals, eigvecs = dense_symmetric_eigs(system.S)
    lam = xi - eigvals[0]

    # undo the similarity: eigenvector of M is T^{-1} times that of S
    vec_active = eigvecs[:, 0] / system.scaling
    psi = np.zeros(op.n)
    psi[active] = vec_active
    if psi[active].sum() < 0:
        psi = -psi
    psi /= np.max(np.abs(psi))
    return lam, psi
