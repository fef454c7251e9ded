"""Uniform open-channel flow: normal depth, velocity, and wetted area.

Channels are rectangular with constant width, bed slope, and Manning
roughness.  At steady discharge the water depth settles at the normal
depth, which fixes the advection speed and cross-section used by the
transport model.  Discharge is conserved through junctions, so giving the
upstream-most discharges determines the whole tree.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import (
    InvalidNetwork,
    MissingUpstreamDischarge,
    PropagationConflict,
)
from .graph import EdgeParams, RiverNetwork

MANNING_K = 1.0  # dimensionless conversion factor (SI units)
_Q_TOL = 1e-12   # relative tolerance for explicitly given junction discharges


@dataclass(frozen=True)
class ChannelSpec:
    B: float               # channel width, m
    n: float               # Manning roughness, s/m^(1/3)
    S0: float              # bed slope, m/m
    Q: float | None = None  # discharge, m^3/s; None until propagated

    def __post_init__(self):
        if not (self.B > 0 and self.n > 0 and self.S0 > 0):
            raise InvalidNetwork(
                f"channel spec requires positive B, n, S0; got {self}"
            )
        if self.Q is not None and not self.Q > 0:
            raise InvalidNetwork(f"channel spec discharge must be positive; got {self.Q}")


def normal_depth(spec: ChannelSpec) -> float:
    """Equilibrium water depth y = (Q^2 n^2 / (B^2 S0 k^2))^(3/10), in m."""
    if spec.Q is None:
        raise InvalidNetwork("normal depth needs a discharge")
    return (spec.Q**2 * spec.n**2 / (spec.B**2 * spec.S0 * MANNING_K**2)) ** 0.3


def uniform_flow(spec: ChannelSpec) -> tuple[float, float]:
    """(velocity m/s, wetted area m^2) of the uniform flow."""
    y = normal_depth(spec)
    A = spec.B * y
    return spec.Q / A, A


def apply_hydrology(
    network: RiverNetwork,
    specs: dict[int, ChannelSpec],
    discharges: dict[int, float] | None = None,
) -> RiverNetwork:
    """Propagate discharge through the tree and overwrite (v, A) per edge.

    specs maps edge id -> ChannelSpec carrying B, n, S0 (the Q field of a
    spec counts as an explicitly given discharge).  discharges optionally
    adds/overrides explicit Q by edge id.  Every upstream-boundary edge must
    end up with a discharge; junction discharges are derived by summation
    and explicit values are only accepted when they agree to relative
    tolerance 1e-12.
    """
    q: dict[int, float] = {}
    for j, spec in specs.items():
        if spec.Q is not None:
            q[j] = spec.Q
    if discharges:
        q.update(discharges)

    upstream_ids = {v.id for v in network.upstream_vertices()}
    for e in network.edges:
        if e.tail in upstream_ids and e.id not in q:
            raise MissingUpstreamDischarge(
                f"edge {e.id} starts at upstream boundary {e.tail} but has no Q"
            )
        if e.id not in specs:
            raise InvalidNetwork(f"edge {e.id} has no channel spec")

    explicit = set(q)
    resolved = _propagate(network, q)

    for j in explicit:
        if abs(resolved[j] - q[j]) > _Q_TOL * max(abs(q[j]), 1e-300):
            raise PropagationConflict(
                f"edge {j}: explicit Q {q[j]!r} disagrees with propagated "
                f"{resolved[j]!r}"
            )

    new_params: list[EdgeParams] = []
    for e in network.edges:
        spec = replace(specs[e.id], Q=resolved[e.id])
        v, A = uniform_flow(spec)
        new_params.append(replace(network.params[e.id], v=v, A=A))
    return network.with_params(new_params)


def _propagate(network: RiverNetwork, q: dict[int, float]) -> dict[int, float]:
    """Resolve all edge discharges from the given ones by junction balance.

    At each junction with exactly one unresolved incident edge the balance
    sum(d * Q) = 0 determines it; sweeping until fixed point covers any tree
    whose upstream edges are given.  Splitting junctions need explicit Q on
    all but one of their edges.
    """
    values = dict(q)
    junctions = network.junctions()
    for _ in range(network.n_edges + 1):
        progress = False
        for v in junctions:
            incident = network.incident_edges(v.id)
            unknown = [e for e in incident if e.id not in values]
            if len(unknown) != 1:
                continue
            e0 = unknown[0]
            balance = sum(network.d(v.id, e.id) * values[e.id]
                          for e in incident if e.id in values)
            values[e0.id] = -balance / network.d(v.id, e0.id)
            progress = True
        if not progress:
            break
    # junctions whose edges were all given explicitly must still balance
    for v in junctions:
        incident = network.incident_edges(v.id)
        if any(e.id not in values for e in incident):
            continue
        total = sum(network.d(v.id, e.id) * values[e.id] for e in incident)
        scale = sum(abs(values[e.id]) for e in incident)
        if abs(total) > _Q_TOL * scale:
            raise PropagationConflict(
                f"junction {v.id}: discharges do not balance (residual {total!r})"
            )
    missing = [e.id for e in network.edges if e.id not in values]
    if missing:
        raise MissingUpstreamDischarge(
            f"cannot determine discharge on edges {missing}; a splitting "
            "junction needs explicit Q on all but one incident edge"
        )
    for e in network.edges:
        if values[e.id] <= 0:
            raise PropagationConflict(
                f"edge {e.id}: propagated discharge {values[e.id]!r} is not positive"
            )
    return values
