from .types import (
    ALL_RESOURCES,
    COMPUTE_RESOURCES,
    MEMORY_PARTNER,
    MEMORY_RESOURCES,
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
)
from .validation import (
    DeratingVerdict,
    ValidationReport,
    validate_derating,
    validate_hub_spec,
)
from .regression import fit_cluster_power_model, fit_memory_ratios
from .configio import (
    hub_from_dict,
    hub_to_dict,
    load_hub,
    read_timeseries,
    save_hub,
    write_timeseries,
)

__all__ = [
    "ALL_RESOURCES",
    "COMPUTE_RESOURCES",
    "MEMORY_PARTNER",
    "MEMORY_RESOURCES",
    "BessSpec",
    "ClusterSpec",
    "DataCenterSpec",
    "DeratingProfile",
    "DeratingVerdict",
    "EconomicsSpec",
    "ExogenousScenario",
    "HubSpec",
    "OrcCurve",
    "PpaContract",
    "PvSpec",
    "RealizedDay",
    "Scenario",
    "ScenarioSet",
    "TimeGrid",
    "ValidationReport",
    "WorkloadScenario",
    "fit_cluster_power_model",
    "fit_memory_ratios",
    "hub_from_dict",
    "hub_to_dict",
    "load_hub",
    "read_timeseries",
    "save_hub",
    "validate_derating",
    "validate_hub_spec",
    "write_timeseries",
]
