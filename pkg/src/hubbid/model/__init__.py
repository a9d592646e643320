from .builder import (
    COST_CATEGORIES,
    HubModelBuilder,
    LinExpr,
    build_hub_model,
    cluster_resources,
)
from .core import (
    BINARY,
    CONTINUOUS,
    Constraint,
    MilpModel,
    Variable,
    add_sos2_adjacency,
    convert_sos2_to_adjacency,
)
from .index import VariableIndex, vname

__all__ = [
    "BINARY",
    "CONTINUOUS",
    "COST_CATEGORIES",
    "Constraint",
    "HubModelBuilder",
    "LinExpr",
    "MilpModel",
    "Variable",
    "VariableIndex",
    "add_sos2_adjacency",
    "build_hub_model",
    "cluster_resources",
    "convert_sos2_to_adjacency",
    "vname",
]
