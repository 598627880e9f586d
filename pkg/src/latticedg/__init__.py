"""Double greedy maximization of DR-submodular functions on the bounded integer lattice."""

from .lattice import (
    BoxConstraint,
    CapacityError,
    DimensionError,
    DomainError,
    GroundSet,
    OracleHandle,
    lattice_vector,
)
from .sketch import Sketch, sketch_build, sketch_eval
from .maximize import (
    Algorithm,
    DRViolationError,
    RunReport,
    double_greedy,
    fast_double_greedy,
    run_algorithm,
    shifted_maximize,
    single_greedy,
)
from .fastsim import (
    ProcessOutcome,
    ProcessParams,
    poly_maximize,
    process_exact_distribution,
    process_naive,
    sample_binomial,
    sample_geometric,
    simulate_process,
)
from .objectives import (
    RevenueObjective,
    TabularObjective,
    WeightedGraph,
    generate_dr_table,
    is_dr_submodular,
    revenue_marginal_identity_check,
    revenue_value,
)

__version__ = "0.1.0"
