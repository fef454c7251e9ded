"""Population persistence metrics and dynamics on river networks.

The library represents a river system as an oriented metric tree, couples
uniform-flow hydraulics to the transport coefficients, discretizes the
advection-diffusion-growth operator with a conservative finite-volume
scheme, and computes the dominant growth rate, the net reproductive rate
with its next-generation distribution, transient dynamics, and positive
steady states.  See README.md for the CLI and docs/config.md for the
scenario document schema.
"""

from .discretize import (
    DiscreteOperator,
    Grid,
    assemble,
    build_grid,
    sample_on_nodes,
    selfadjoint_scaling,
    symmetrization_weights,
)
from .dynamics import (
    Extinct,
    FieldState,
    GrowthModel,
    simulate,
    steady_state,
    step,
    total_mass,
)
from .eigen import (
    EigenOutcome,
    SignReport,
    growth_potential,
    net_reproductive_rate,
    principal_eigenvalue,
    sign_consistency,
)
from .errors import (
    ConfigError,
    CycleDetected,
    Disconnected,
    FlowConservationViolated,
    InvalidNetwork,
    InvalidRobinPair,
    MissingUpstreamDischarge,
    MortalityNotDominant,
    NewtonDiverged,
    NoConvergence,
    NonpositiveLength,
    NotATree,
    NumericalError,
    PositivityViolated,
    PropagationConflict,
    RiverNetError,
    SchemaViolation,
    SignMismatch,
    SingularFactorization,
    UnknownPreset,
    UnsupportedBoundaryCombination,
)
from .graph import (
    BCKind,
    BoundaryCondition,
    Edge,
    EdgeParams,
    PRESET_NAMES,
    RiverNetwork,
    SharedParams,
    Vertex,
    VertexClass,
    boundary_set,
    build_network,
    preset,
)
from .hydrology import ChannelSpec, apply_hydrology, normal_depth, uniform_flow
from .oracle import (
    SymmetrizedSystem,
    dense_symmetric_eigs,
    interval_R0,
    interval_lambda_star,
    lambda_star_dense,
    symmetrize_tree_matrix,
)
from .runner import Scenario, load_config, run, sweep

__version__ = "0.1.0"
