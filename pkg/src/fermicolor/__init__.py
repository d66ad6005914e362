"""
fermicolor

Parallel scheduling of fermionic interaction terms under custom
fermion-to-qubit encodings: route each term along a system graph, build the
weak (vertex) or strong (qubit) conflict graph and color it into layers that
can run simultaneously.
"""

__version__ = "0.1.0"

from .pauli import (
    PauliString,
    multiply,
    product,
    commutes,
    support,
    PauliError,
    PauliParseError,
)

from .system_graph import (
    # Graphs and layouts
    SystemGraph,
    QubitLayout,
    build,
    qubit_count,
    set_enumeration,
    default_enumeration,
    with_kinds,

    # Generators
    gen_star,
    gen_complete,
    gen_line,
    gen_grid,
    gen_bottleneck,
    bottleneck_enumeration,
    bottleneck_layout,
    BottleneckLayout,
    gen_triangular,
    gen_heavy_hexagon,
    generate,
    GENERATORS,

    # Exceptions
    SystemGraphError,
    DisconnectedGraphError,
    DuplicateEdgeError,
    SelfLoopError,
    UnknownVertexError,
    BadSizeError,
    NotABijectionError,
    GraphFormatError,
)

from .routing import (
    Interaction,
    PathSet,
    route,
    bottleneck_routes,
    shortest_path,
    greedy_enumerate,
    interaction_vertices,
    RoutingError,
    UnreachableEndpointError,
    NonPhysicalEndpointError,
    InvalidInteractionError,
    PathFormatError,
)

from .encoding import (
    Segment,
    xi,
    local_majorana,
    vertex_operator,
    edge_operator,
    path_operator,
    loop_operator,
    active_qubits,
    interaction_support,
    interaction_operator,
    explicit_support,
    EncodingError,
)

from .coloring import (
    ConflictGraph,
    Schedule,
    build_weak,
    build_strong,
    build_conflict_graph,
    greedy_color,
    largest_first_order,
    blocked_order,
    bottleneck_layers,
    greedy_clique,
    clique_lower_bound,
    brooks_bound,
    exact_chromatic,
    ColoringError,
    TooLargeError,
)

from .models import (
    Model,
    EmbeddedModel,
    all_to_all,
    nn_hopping,
    embed,
    ModelError,
    TooManyModesError,
)

from .analytic import (
    chi_weak_star,
    chi_strong_star,
    chi_weak_complete,
    chi_strong_complete_bounds,
    chi_bottleneck,
)

from .config import (
    RunConfig,
    RoutingParams,
    GraphSource,
    ModelSource,
    ConfigManager,
    load_config,
    configure_logging,
    FermicolorConfigError,
    ConfigValidationError,
    ConfigLoadError,
)

from .harness import (
    Problem,
    RunResult,
    prepare_problem,
    run_restart,
    run,
    run_async,
    run_placements,
    run_placements_async,
    sweep,
    verify_schedule,
    write_run_outputs,
    HarnessError,
    ScheduleVerificationError,
)

__all__ = [
    "__version__",

    # Pauli algebra
    "PauliString",
    "multiply",
    "product",
    "commutes",
    "support",
    "PauliError",
    "PauliParseError",

    # System graphs
    "SystemGraph",
    "QubitLayout",
    "build",
    "qubit_count",
    "set_enumeration",
    "default_enumeration",
    "with_kinds",
    "gen_star",
    "gen_complete",
    "gen_line",
    "gen_grid",
    "gen_bottleneck",
    "bottleneck_enumeration",
    "bottleneck_layout",
    "BottleneckLayout",
    "gen_triangular",
    "gen_heavy_hexagon",
    "generate",
    "GENERATORS",
    "SystemGraphError",
    "DisconnectedGraphError",
    "DuplicateEdgeError",
    "SelfLoopError",
    "UnknownVertexError",
    "BadSizeError",
    "NotABijectionError",
    "GraphFormatError",

    # Routing
    "Interaction",
    "PathSet",
    "route",
    "bottleneck_routes",
    "shortest_path",
    "greedy_enumerate",
    "interaction_vertices",
    "RoutingError",
    "UnreachableEndpointError",
    "NonPhysicalEndpointError",
    "InvalidInteractionError",
    "PathFormatError",

    # Encoding
    "Segment",
    "xi",
    "local_majorana",
    "vertex_operator",
    "edge_operator",
    "path_operator",
    "loop_operator",
    "active_qubits",
    "interaction_support",
    "interaction_operator",
    "explicit_support",
    "EncodingError",

    # Coloring
    "ConflictGraph",
    "Schedule",
    "build_weak",
    "build_strong",
    "build_conflict_graph",
    "greedy_color",
    "largest_first_order",
    "blocked_order",
    "bottleneck_layers",
    "greedy_clique",
    "clique_lower_bound",
    "brooks_bound",
    "exact_chromatic",
    "ColoringError",
    "TooLargeError",

    # Models
    "Model",
    "EmbeddedModel",
    "all_to_all",
    "nn_hopping",
    "embed",
    "ModelError",
    "TooManyModesError",

    # Closed forms
    "chi_weak_star",
    "chi_strong_star",
    "chi_weak_complete",
    "chi_strong_complete_bounds",
    "chi_bottleneck",

    # Configuration
    "RunConfig",
    "RoutingParams",
    "GraphSource",
    "ModelSource",
    "ConfigManager",
    "load_config",
    "configure_logging",
    "FermicolorConfigError",
    "ConfigValidationError",
    "ConfigLoadError",

    # Harness
    "Problem",
    "RunResult",
    "prepare_problem",
    "run_restart",
    "run",
    "run_async",
    "run_placements",
    "run_placements_async",
    "sweep",
    "verify_schedule",
    "write_run_outputs",
    "HarnessError",
    "ScheduleVerificationError",
]
