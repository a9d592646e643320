"""Solver-agnostic MILP container: variables, rows, SOS2 sets, objective."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from ..errors import BuildError

CONTINUOUS = "continuous"
BINARY = "binary"

SENSES = ("<=", "=", ">=")


@dataclass
class Variable:
    name: str
    kind: str
    lb: float
    ub: float


@dataclass
class Constraint:
    name: str
    coeffs: dict[int, float]
    sense: str
    rhs: float


class MilpModel:
    """A minimization MILP assembled row by row.

    Variables and constraints are referenced by integer id in insertion
    order; names are unique and stable, so emitted files and parsed solutions
    are deterministic for identical build sequences.
    """

    def __init__(self, name: str = "model"):
        self.name = name
        self.variables: list[Variable] = []
        self.constraints: list[Constraint] = []
        self.sos2_sets: list[list[int]] = []
        self.objective: dict[int, float] = {}
        self.objective_constant: float = 0.0
        self._var_ids: dict[str, int] = {}

    # --- variables ---------------------------------------------------------

    def add_variable(
        self, name: str, lb: float = 0.0, ub: float = math.inf, kind: str = CONTINUOUS
    ) -> int:
        if name in self._var_ids:
            raise BuildError(f"duplicate variable name {name!r}")
        if kind not in (CONTINUOUS, BINARY):
            raise BuildError(f"unknown variable kind {kind!r}")
        if not lb <= ub:
            raise BuildError(f"variable {name!r}: lb {lb} > ub {ub}")
        if kind == BINARY and (lb < 0 or ub > 1):
            raise BuildError(f"binary variable {name!r} must have bounds within [0, 1]")
        self.variables.append(Variable(name, kind, float(lb), float(ub)))
        vid = len(self.variables) - 1
        self._var_ids[name] = vid
        return vid

    def variable_id(self, name: str) -> int:
        return self._var_ids[name]

    @property
    def n_variables(self) -> int:
        return len(self.variables)

    @property
    def n_constraints(self) -> int:
        return len(self.constraints)

    # --- constraints ---------------------------------------------------------

    def add_constraint(
        self, name: str, coeffs: Mapping[int, float], sense: str, rhs: float
    ) -> int:
        if sense not in SENSES:
            raise BuildError(f"constraint {name!r}: unknown sense {sense!r}")
        clean: dict[int, float] = {}
        for vid, coeff in coeffs.items():
            if not 0 <= vid < len(self.variables):
                raise BuildError(f"constraint {name!r} references unknown variable id {vid}")
            if not math.isfinite(coeff):
                raise BuildError(f"constraint {name!r}: non-finite coefficient on id {vid}")
            if coeff != 0.0:
                clean[vid] = float(coeff)
        if not math.isfinite(rhs):
            raise BuildError(f"constraint {name!r}: non-finite rhs")
        self.constraints.append(Constraint(name, clean, sense, float(rhs)))
        return len(self.constraints) - 1

    def add_sos2(self, var_ids: Sequence[int]) -> int:
        ids = list(var_ids)
        if len(ids) < 2:
            raise BuildError("SOS2 set needs at least 2 variables")
        for vid in ids:
            if not 0 <= vid < len(self.variables):
                raise BuildError(f"SOS2 set references unknown variable id {vid}")
            if self.variables[vid].kind != CONTINUOUS:
                raise BuildError(
                    f"SOS2 member {self.variables[vid].name!r} must be continuous"
                )
        self.sos2_sets.append(ids)
        return len(self.sos2_sets) - 1

    # --- objective -----------------------------------------------------------

    def add_objective_term(self, var_id: int, coeff: float) -> None:
        if not 0 <= var_id < len(self.variables):
            raise BuildError(f"objective references unknown variable id {var_id}")
        if not math.isfinite(coeff):
            raise BuildError("objective coefficient must be finite")
        value = self.objective.get(var_id, 0.0) + float(coeff)
        if value == 0.0:
            self.objective.pop(var_id, None)
        else:
            self.objective[var_id] = value

    def add_objective_constant(self, value: float) -> None:
        self.objective_constant += float(value)

    def objective_value(self, values: Mapping[str, float]) -> float:
        """Evaluate the objective at a solution keyed by variable name."""
        total = self.objective_constant
        for vid, coeff in self.objective.items():
            total += coeff * values[self.variables[vid].name]
        return total


def add_sos2_adjacency(model: MilpModel, var_ids: Sequence[int], tag: str) -> None:
    """Encode SOS2 over ``var_ids`` with segment binaries and adjacency rows.

    Adds one binary per segment (sum = 1) and one row per member allowing it
    to be nonzero only when an adjacent segment is active. Members must have
    finite upper bounds, which serve as the row big-M.
    """
    n = len(var_ids)
    if n < 2:
        raise BuildError("SOS2 adjacency conversion needs at least 2 variables")
    seg_ids = [
        model.add_variable(f"{tag}_seg({j})", lb=0.0, ub=1.0, kind=BINARY)
        for j in range(n - 1)
    ]
    model.add_constraint(
        f"{tag}_segsum", {sid: 1.0 for sid in seg_ids}, "=", 1.0
    )
    for i, vid in enumerate(var_ids):
        ub = model.variables[vid].ub
        if not math.isfinite(ub):
            raise BuildError(
                f"SOS2 member {model.variables[vid].name!r} needs a finite upper bound"
            )
        coeffs = {vid: 1.0}
        if i - 1 >= 0:
            coeffs[seg_ids[i - 1]] = -ub
        if i < n - 1:
            coeffs[seg_ids[i]] = coeffs.get(seg_ids[i], 0.0) - ub
        model.add_constraint(f"{tag}_adj({i})", coeffs, "<=", 0.0)


def convert_sos2_to_adjacency(model: MilpModel) -> MilpModel:
    """Copy a model, replacing every SOS2 set with the binary formulation."""
    out = MilpModel(model.name)
    for v in model.variables:
        out.add_variable(v.name, v.lb, v.ub, v.kind)
    for c in model.constraints:
        out.add_constraint(c.name, dict(c.coeffs), c.sense, c.rhs)
    out.objective = dict(model.objective)
    out.objective_constant = model.objective_constant
    for k, ids in enumerate(model.sos2_sets):
        add_sos2_adjacency(out, ids, f"sos2({k})")
    return out
