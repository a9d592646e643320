"""Day-ahead bidding engine for small data-center energy hubs.

Plans the next-day grid exchange of a hub combining a data center with
flexible workloads, battery storage, PV, waste-heat recovery and a heat
engine, under uncertainty. The planning problem is a scenario-based MILP
with a CVaR risk term and chance constraints on workload service levels
and the renewable supply share.
"""

__version__ = "0.1.0"

from .domain import (  # noqa: F401
    BessSpec,
    ClusterSpec,
    DataCenterSpec,
    DeratingProfile,
    EconomicsSpec,
    ExogenousScenario,
    HubSpec,
    OrcCurve,
    PpaContract,
    PvSpec,
    RealizedDay,
    Scenario,
    ScenarioSet,
    TimeGrid,
    WorkloadScenario,
    load_hub,
    save_hub,
    validate_derating,
    validate_hub_spec,
)
from .errors import (  # noqa: F401
    BackendError,
    BuildError,
    FitError,
    HubbidError,
    InputError,
    PlanningInfeasibleError,
    SerializationError,
    SolutionIntegrityError,
    SolverNotFoundError,
)
from .bidding import (  # noqa: F401
    BidResult,
    discrete_cvar,
    extract_vcc,
    load_bid,
    plan_day,
    save_bid,
    write_bid_csv,
    write_vcc_csv,
)
from .evaluation import (  # noqa: F401
    DayOutcome,
    EvaluationReport,
    SchemeComparison,
    compare_schemes,
    evaluate_day,
    evaluate_days,
    expost_reoptimize,
    summarize,
    write_outcomes_csv,
)
from .manifest import (  # noqa: F401
    RunManifest,
    load_caps,
    load_manifest,
    load_realized_day,
    load_scenario_inputs,
    save_realized_day,
)
from .model import build_hub_model  # noqa: F401
from .scenarios import (  # noqa: F401
    ImbalanceFactors,
    ResidualHistory,
    ScenarioInputs,
    bootstrap_scenarios,
    calibrate_imbalance_factors,
    combine_scenarios,
    generate_scenario_set,
    load_scenario_set,
    redistribute_flexible_uniform,
    reduce_kmeans,
    save_scenario_set,
)
from .solver import (  # noqa: F401
    Solution,
    SolveOptions,
    check_solution,
    solution_invariants,
    solve,
    write_lp,
    write_mps,
)
