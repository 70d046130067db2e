"""Stochastic packing integer programs with queries.

Library plus CLI for experimenting with LP-guided adaptive and non-adaptive
query strategies on packing problems (matchings, hypergraph matchings,
matroids, column-sparse programs), validated against exact desk-scale
oracles, with a witness-cover laboratory and color-coding sparsification.
"""

__version__ = "0.1.0"

from .adapters import ProblemAdapter, RoundedSolution, adapter_for
from .errors import (
    PivotLimitError,
    SizeRefusalError,
    StochpackError,
    StructureError,
)
from .instances import (
    PackingInstance,
    QueryOracle,
    Realization,
    StochasticObjective,
    ValidationReport,
    load_instance,
    optimistic_vector,
    pessimistic_vector,
    sample_realization,
    save_instance,
    validate_instance,
)
from .lp import (
    DualSolution,
    DualityReport,
    LpProblem,
    LpSolution,
    check_duality,
    solve_dual,
    solve_dual_explicit,
    solve_primal,
)
from .sparsify import (
    ColoringConfig,
    SparsifiedInstance,
    beta,
    falling_factorial_lower_bound,
    sparsify,
    speedup_run,
)
from .strategies import (
    RunResult,
    RunTrace,
    StrategyConfig,
    default_iterations,
    default_log_witness_count,
    iteration_bound,
    run_adaptive,
    run_baseline,
    run_nonadaptive,
)
from .witness import (
    WitnessCover,
    WitnessTracker,
    enumerate_sparse_cover,
    enumerate_tdi_cover,
    survival_bound,
    verify_cover_property,
)

__all__ = [name for name in dir() if not name.startswith("_")]
