"""Pedestrian flow on networks: a congestion-weighted distance-to-exit
potential coupled to a monotone explicit conservation law, plus the scenario
tooling around it."""

from .errors import (
    BoundsViolation,
    CflViolation,
    DegenerateEdge,
    DensityOutOfRange,
    DiffusionCflViolation,
    Disconnected,
    DomainError,
    DuplicateEdge,
    EmptyBoundary,
    NoConvergence,
    NonPositiveWeight,
    ParseError,
    PedflowError,
    ScenarioInvalid,
    SelfLoop,
)
from .eikonal import (
    EikonalOptions,
    EikonalResult,
    check_eikonal_residual,
    eikonal_oracle,
    value_iteration,
    vertex_cost,
)
from .fluxes import (
    MNORM,
    FluxScheme,
    flux_scheme,
    fundamental_diagram,
    numerical_flux,
    oriented_flux,
)
from .graph import (
    WeightedGraph,
    boundary_distance,
    build_graph,
    geodesic_distance,
    max_degree,
)
from .network import (
    DensityExpr,
    NetworkSpec,
    discretize,
    sample_density,
    stadium_network,
    star_network,
    validate_stability,
)
from .scenario import PreparedScenario, ScenarioConfig, load_scenario, scenario_from_dict
from .simulation import (
    SimState,
    StopRules,
    Trajectory,
    detect_steady_state,
    initial_state,
    run,
    step,
)
from .transport import (
    BoundaryMode,
    StepParams,
    advect,
    apply_diffusion,
    diffuse,
    orientation_from_potential,
    transport_update,
)

__version__ = "0.1.0"
