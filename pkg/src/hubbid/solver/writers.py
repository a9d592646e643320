"""Deterministic LP and free-MPS writers.

Both formats carry the full model including SOS2 sets, so an external solver
can consume exactly what the embedded one sees. Output is byte-stable for a
given model: fixed section order, variables and rows in declaration order,
coefficients sorted by column, shortest round-trip float formatting.
"""

from __future__ import annotations

import math
from typing import Iterable

from ..errors import SerializationError
from ..model.core import BINARY, CONTINUOUS, MilpModel

_SENSE_LP = {"<=": "<=", ">=": ">=", "=": "="}
_SENSE_MPS = {"<=": "L", ">=": "G", "=": "E"}


def _num(x: float) -> str:
    if x == math.floor(x) and abs(x) < 1e16:
        return str(int(x))
    return repr(float(x))


def _check_names(model: MilpModel) -> None:
    seen: set[str] = set()
    for v in model.variables:
        if any(ch.isspace() for ch in v.name):
            raise SerializationError(f"variable name {v.name!r} contains whitespace")
        if v.kind not in (CONTINUOUS, BINARY):
            raise SerializationError(f"variable {v.name!r} has kind {v.kind!r}")
    row_names = set()
    for c in model.constraints:
        if any(ch.isspace() for ch in c.name):
            raise SerializationError(f"constraint name {c.name!r} contains whitespace")
        if c.name in row_names:
            raise SerializationError(f"duplicate constraint name {c.name!r}")
        row_names.add(c.name)
    seen.update(row_names)
    for v in model.variables:
        if v.name in seen:
            raise SerializationError(
                f"name {v.name!r} used for both a variable and a constraint"
            )


def _terms(coeffs: Iterable[tuple[int, float]], model: MilpModel) -> str:
    parts = []
    for vid, coeff in coeffs:
        sign = "-" if coeff < 0 else "+"
        parts.append(f"{sign} {_num(abs(coeff))} {model.variables[vid].name}")
    joined = " ".join(parts)
    return joined[2:] if joined.startswith("+ ") else joined


def lp_string(model: MilpModel) -> str:
    """Render the model in CPLEX LP format (SOS section included)."""
    _check_names(model)
    out = [f"\\ {model.name}", "Minimize"]
    obj_terms = sorted(model.objective.items())
    obj = _terms(obj_terms, model) if obj_terms else "0"
    if model.objective_constant:
        sign = "-" if model.objective_constant < 0 else "+"
        obj += f" {sign} {_num(abs(model.objective_constant))}"
    out.append(f" obj: {obj}")
    out.append("Subject To")
    for c in model.constraints:
        body = _terms(sorted(c.coeffs.items()), model) if c.coeffs else "0"
        out.append(f" {c.name}: {body} {_SENSE_LP[c.sense]} {_num(c.rhs)}")
    bounds = []
    for v in model.variables:
        if v.kind == BINARY:
            continue
        if v.lb == 0.0 and v.ub == math.inf:
            continue
        if v.lb == v.ub:
            bounds.append(f" {v.name} = {_num(v.lb)}")
        elif v.lb == -math.inf and v.ub == math.inf:
            bounds.append(f" {v.name} free")
        else:
            lo = "-infinity" if v.lb == -math.inf else _num(v.lb)
            hi = "+infinity" if v.ub == math.inf else _num(v.ub)
            bounds.append(f" {lo} <= {v.name} <= {hi}")
    if bounds:
        out.append("Bounds")
        out.extend(bounds)
    binaries = [v.name for v in model.variables if v.kind == BINARY]
    if binaries:
        out.append("Binaries")
        for i in range(0, len(binaries), 8):
            out.append(" " + " ".join(binaries[i : i + 8]))
    if model.sos2_sets:
        out.append("SOS")
        for k, ids in enumerate(model.sos2_sets):
            members = " ".join(
                f"{model.variables[vid].name}:{j + 1}" for j, vid in enumerate(ids)
            )
            out.append(f" s{k}: S2:: {members}")
    out.append("End")
    return "\n".join(out) + "\n"


def mps_string(model: MilpModel) -> str:
    """Render the model in free MPS format.

    Binary variables are marked with ``BV`` bound lines; SOS2 sets go in a
    trailing ``SOS`` section with 1-based weights.
    """
    _check_names(model)
    out = [f"NAME {model.name}", "ROWS", " N obj"]
    for c in model.constraints:
        out.append(f" {_SENSE_MPS[c.sense]} {c.name}")

    entries: list[list[tuple[str, float]]] = [[] for _ in model.variables]
    for vid, coeff in sorted(model.objective.items()):
        entries[vid].append(("obj", coeff))
    for c in model.constraints:
        for vid, coeff in c.coeffs.items():
            entries[vid].append((c.name, coeff))

    out.append("COLUMNS")
    for vid, v in enumerate(model.variables):
        cols = entries[vid] or [("obj", 0.0)]
        for name, coeff in cols:
            out.append(f" {v.name} {name} {_num(coeff)}")

    out.append("RHS")
    if model.objective_constant:
        out.append(f" rhs obj {_num(-model.objective_constant)}")
    for c in model.constraints:
        if c.rhs:
            out.append(f" rhs {c.name} {_num(c.rhs)}")

    bound_lines = []
    for v in model.variables:
        if v.kind == BINARY:
            bound_lines.append(f" BV bnd {v.name}")
            continue
        if v.lb == 0.0 and v.ub == math.inf:
            continue
        if v.lb == v.ub:
            bound_lines.append(f" FX bnd {v.name} {_num(v.lb)}")
            continue
        if v.lb == -math.inf and v.ub == math.inf:
            bound_lines.append(f" FR bnd {v.name}")
            continue
        if v.lb == -math.inf:
            bound_lines.append(f" MI bnd {v.name}")
        elif v.lb != 0.0 or v.ub < 0.0:
            bound_lines.append(f" LO bnd {v.name} {_num(v.lb)}")
        if v.ub != math.inf:
            bound_lines.append(f" UP bnd {v.name} {_num(v.ub)}")
    if bound_lines:
        out.append("BOUNDS")
        out.extend(bound_lines)

    if model.sos2_sets:
        out.append("SOS")
        for k, ids in enumerate(model.sos2_sets):
            out.append(f" S2 sos{k}")
            for j, vid in enumerate(ids):
                out.append(f"    {model.variables[vid].name} {j + 1}")
    out.append("ENDATA")
    return "\n".join(out) + "\n"


def write_lp(model: MilpModel, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(lp_string(model))


def write_mps(model: MilpModel, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(mps_string(model))
