"""Solve dispatch: embedded scipy backend or an external CBC-style binary.

The external path is selected by the ``HUBBID_SOLVER`` environment variable
(a command line prefix, e.g. ``cbc`` or ``/opt/cbc/bin/cbc -threads 4``). It
receives a free-MPS file and must leave a CBC-style solution file. Without
the variable, the model is handed to ``scipy.optimize.milp``.
"""

from __future__ import annotations

import math
import os
import shlex
import subprocess
import tempfile
import time
from pathlib import Path

import numpy as np
from scipy import sparse
from scipy.optimize import Bounds, LinearConstraint, milp

from ..errors import BackendError, SolverNotFoundError
from ..model.core import BINARY, MilpModel, convert_sos2_to_adjacency
from .options import INFEASIBLE, LIMIT, OPTIMAL, UNBOUNDED, Solution, SolveOptions
from .writers import write_mps

ENV_SOLVER = "HUBBID_SOLVER"


def solve(model: MilpModel, options: SolveOptions | None = None) -> Solution:
    """Solve ``model`` with the configured backend."""
    options = options or SolveOptions()
    command = os.environ.get(ENV_SOLVER, "").strip()
    if command:
        return solve_external(model, shlex.split(command), options)
    return solve_scipy(model, options)


# --- embedded backend ---------------------------------------------------------


def solve_scipy(model: MilpModel, options: SolveOptions | None = None) -> Solution:
    """Solve with scipy's HiGHS-based MILP interface.

    scipy has no SOS support, so SOS2 sets are always rewritten with segment
    binaries here regardless of ``native_sos2``.
    """
    options = options or SolveOptions()
    work = convert_sos2_to_adjacency(model) if model.sos2_sets else model

    n = work.n_variables
    c = np.zeros(n)
    for vid, coeff in work.objective.items():
        c[vid] = coeff
    integrality = np.zeros(n)
    lb = np.empty(n)
    ub = np.empty(n)
    for vid, v in enumerate(work.variables):
        lb[vid] = v.lb
        ub[vid] = v.ub
        if v.kind == BINARY:
            integrality[vid] = 1

    rows_ix, cols, data, lo, hi = [], [], [], [], []
    for i, con in enumerate(work.constraints):
        for vid, coeff in con.coeffs.items():
            rows_ix.append(i)
            cols.append(vid)
            data.append(coeff)
        if con.sense == "<=":
            lo.append(-np.inf)
            hi.append(con.rhs)
        elif con.sense == ">=":
            lo.append(con.rhs)
            hi.append(np.inf)
        else:
            lo.append(con.rhs)
            hi.append(con.rhs)

    milp_options: dict = {"disp": False, "mip_rel_gap": options.mip_gap}
    if options.time_limit is not None:
        milp_options["time_limit"] = float(options.time_limit)

    start = time.perf_counter()
    res = milp(
        c=c,
        constraints=(
            LinearConstraint(
                sparse.csc_array(
                    (data, (rows_ix, cols)), shape=(work.n_constraints, n)
                ),
                np.asarray(lo),
                np.asarray(hi),
            ),
        )
        if work.constraints
        else (),
        integrality=integrality,
        bounds=Bounds(lb, ub),
        options=milp_options,
    )
    elapsed = time.perf_counter() - start

    if res.status == 2:
        return Solution(INFEASIBLE, None, {}, None, elapsed)
    if res.status == 3:
        return Solution(UNBOUNDED, None, {}, None, elapsed)
    if res.status == 4 or (res.status != 0 and res.x is None):
        raise BackendError(
            f"embedded solver failed: {res.message}", raw_output=str(res.message)
        )

    status = OPTIMAL if res.status == 0 else LIMIT
    values = {v.name: float(res.x[vid]) for vid, v in enumerate(work.variables)}
    gap = getattr(res, "mip_gap", None)
    if gap is not None and not math.isfinite(gap):
        gap = None
    objective = float(res.fun) + work.objective_constant
    return Solution(status, objective, values, gap, elapsed)


# --- external backend ----------------------------------------------------------


def solve_external(
    model: MilpModel, argv: list[str], options: SolveOptions | None = None
) -> Solution:
    """Run a CBC-style command on a free-MPS dump of the model.

    The command is invoked as ``argv + [model.mps, flags..., solve,
    solution, out.sol]`` and must write a solution file whose first line
    names the status and objective, followed by ``index name value`` rows.
    """
    options = options or SolveOptions()
    work = model if options.native_sos2 else convert_sos2_to_adjacency(model)
    with tempfile.TemporaryDirectory(prefix="hubbid-") as td:
        mps_path = Path(td) / "model.mps"
        sol_path = Path(td) / "model.sol"
        write_mps(work, mps_path)
        cmd = list(argv) + [str(mps_path)]
        if options.time_limit is not None:
            cmd += ["-seconds", str(float(options.time_limit))]
        if options.mip_gap:
            cmd += ["-ratioGap", str(float(options.mip_gap))]
        if options.threads:
            cmd += ["-threads", str(int(options.threads))]
        if options.seed is not None:
            cmd += ["-randomCbcSeed", str(int(options.seed))]
        cmd += ["-solve", "-solution", str(sol_path)]

        start = time.perf_counter()
        try:
            proc = subprocess.run(cmd, capture_output=True, text=True)
        except FileNotFoundError as exc:
            raise SolverNotFoundError(
                f"external solver {argv[0]!r} not found; unset {ENV_SOLVER} to use "
                f"the embedded backend"
            ) from exc
        elapsed = time.perf_counter() - start

        output = proc.stdout + proc.stderr
        if proc.returncode != 0:
            raise BackendError(
                f"external solver exited with code {proc.returncode}",
                raw_output=output,
            )
        if not sol_path.exists():
            raise BackendError(
                "external solver produced no solution file", raw_output=output
            )
        return _parse_cbc_solution(
            sol_path.read_text(), work, elapsed, output
        )


def _parse_cbc_solution(
    text: str, model: MilpModel, elapsed: float, raw_output: str
) -> Solution:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise BackendError("empty solution file", raw_output=raw_output)
    header = lines[0]
    lowered = header.lower()
    if "infeasible" in lowered:
        return Solution(INFEASIBLE, None, {}, None, elapsed)
    if "unbounded" in lowered:
        return Solution(UNBOUNDED, None, {}, None, elapsed)
    if "optimal" in lowered:
        status = OPTIMAL
    elif "stopped" in lowered or "interrupt" in lowered:
        status = LIMIT
    else:
        raise BackendError(
            f"unrecognized solution status line: {header!r}", raw_output=raw_output
        )

    objective = None
    if "objective value" in lowered:
        try:
            objective = float(header.split()[-1])
        except ValueError:
            pass

    known = {v.name for v in model.variables}
    values = {v.name: 0.0 for v in model.variables}
    for line in lines[1:]:
        tokens = line.split()
        if len(tokens) >= 3 and tokens[1] in known:
            try:
                values[tokens[1]] = float(tokens[2])
            except ValueError:
                raise BackendError(
                    f"bad value for {tokens[1]!r} in solution file",
                    raw_output=raw_output,
                )
    if objective is None:
        values_by_name = dict(values)
        objective = model.objective_constant + sum(
            coeff * values_by_name[model.variables[vid].name]
            for vid, coeff in model.objective.items()
        )
    return Solution(status, objective, values, None, elapsed)
