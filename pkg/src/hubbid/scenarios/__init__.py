from .residuals import ResidualHistory, bootstrap_scenarios
from .imbalance import ImbalanceFactors, calibrate_imbalance_factors
from .combine import ComboSet, combine_scenarios
from .reduce import ReducedSet, reduce_kmeans
from .workload import redistribute_flexible_uniform
from .setio import (
    load_scenario_set,
    save_scenario_set,
    scenario_set_from_dict,
    scenario_set_to_dict,
)
from .pipeline import (
    EXOGENOUS_PARAMS,
    ScenarioInputs,
    build_parameter_pools,
    combos_to_scenario,
    generate_scenario_set,
)

__all__ = [
    "ComboSet",
    "EXOGENOUS_PARAMS",
    "ImbalanceFactors",
    "ReducedSet",
    "ResidualHistory",
    "ScenarioInputs",
    "bootstrap_scenarios",
    "build_parameter_pools",
    "calibrate_imbalance_factors",
    "combine_scenarios",
    "combos_to_scenario",
    "generate_scenario_set",
    "load_scenario_set",
    "reduce_kmeans",
    "redistribute_flexible_uniform",
    "save_scenario_set",
    "scenario_set_to_dict",
    "scenario_set_from_dict",
]
