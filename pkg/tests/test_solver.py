import math
import stat
import sys

import numpy as np
import pytest

from hubbid.errors import SerializationError, SolverNotFoundError
from hubbid.model import BINARY, MilpModel, convert_sos2_to_adjacency
from hubbid.solver import (
    INFEASIBLE,
    OPTIMAL,
    UNBOUNDED,
    SolveOptions,
    check_solution,
    lp_string,
    mps_string,
    solve,
    solve_external,
    solve_scipy,
)


def tiny_model() -> MilpModel:
    m = MilpModel("tiny")
    x = m.add_variable("x", lb=0.0, ub=10.0)
    y = m.add_variable("y", lb=-math.inf, ub=math.inf)
    z = m.add_variable("z", ub=1.0, kind=BINARY)
    w = m.add_variable("w", lb=0.0, ub=5.0)
    m.add_constraint("c1", {x: 1.0, y: 2.0}, "<=", 10.0)
    m.add_constraint("c2", {x: 1.0, z: -3.0}, ">=", -2.5)
    m.add_objective_term(x, 1.5)
    m.add_objective_term(z, -2.0)
    m.add_objective_constant(7.0)
    m.add_sos2([x, w])
    return m


# --- embedded backend ---------------------------------------------------------


def test_simple_lp_optimum():
    m = MilpModel()
    x = m.add_variable("x")
    m.add_constraint("floor", {x: 1.0}, ">=", 3.0)
    m.add_objective_term(x, 1.0)
    m.add_objective_constant(10.0)
    sol = solve_scipy(m)
    assert sol.status == OPTIMAL
    assert sol.objective == pytest.approx(13.0)
    assert sol.values["x"] == pytest.approx(3.0)


def test_infeasible_status():
    m = MilpModel()
    x = m.add_variable("x")
    m.add_constraint("lo", {x: 1.0}, ">=", 2.0)
    m.add_constraint("hi", {x: 1.0}, "<=", 1.0)
    sol = solve_scipy(m)
    assert sol.status == INFEASIBLE
    assert sol.objective is None
    assert not sol.ok


def test_unbounded_status():
    m = MilpModel()
    x = m.add_variable("x")
    m.add_objective_term(x, -1.0)
    sol = solve_scipy(m)
    assert sol.status == UNBOUNDED


def test_knapsack_against_enumeration():
    rng = np.random.default_rng(7)
    for _ in range(5):
        n = 12
        weights = rng.integers(1, 20, n).astype(float)
        values = rng.integers(1, 30, n).astype(float)
        budget = float(weights.sum() * 0.4)

        m = MilpModel("knapsack")
        ids = [m.add_variable(f"x{i}", ub=1.0, kind=BINARY) for i in range(n)]
        m.add_constraint("cap", {ids[i]: weights[i] for i in range(n)}, "<=", budget)
        for i in range(n):
            m.add_objective_term(ids[i], -values[i])
        sol = solve_scipy(m)
        assert sol.status == OPTIMAL

        best = 0.0
        for mask in range(1 << n):
            picked = [(mask >> i) & 1 for i in range(n)]
            if float(np.dot(picked, weights)) <= budget:
                best = max(best, float(np.dot(picked, values)))
        assert -sol.objective == pytest.approx(best, abs=1e-9)
        assert check_solution(m, sol.values) == []


def curve_model() -> MilpModel:
    # convex increasing curve: the hull chord overshoots interpolation,
    # so adjacency must bind when maximizing power at a fixed heat input
    m = MilpModel("curve")
    heat = [0.0, 50.0, 100.0]
    power = [0.0, 5.0, 12.0]
    lam = [m.add_variable(f"lam{i}", ub=1.0) for i in range(3)]
    p = m.add_variable("p", ub=12.0)
    m.add_constraint("lam_sum", {v: 1.0 for v in lam}, "=", 1.0)
    m.add_constraint(
        "heat_in", {lam[i]: heat[i] for i in range(3)}, "=", 75.0
    )
    m.add_constraint(
        "power_cap", {p: 1.0, **{lam[i]: -power[i] for i in range(3)}}, "<=", 0.0
    )
    m.add_objective_term(p, -1.0)
    m.add_sos2(lam)
    return m


def test_sos2_adjacency_binds():
    m = curve_model()
    sol = solve_scipy(m)
    assert sol.status == OPTIMAL
    assert -sol.objective == pytest.approx(8.5, abs=1e-8)
    assert check_solution(m, sol.values) == []

    # without the SOS2 restriction the hull chord gives 9 at the same heat
    relaxed = MilpModel("relaxed")
    for v in m.variables:
        relaxed.add_variable(v.name, v.lb, v.ub, v.kind)
    for c in m.constraints:
        relaxed.add_constraint(c.name, dict(c.coeffs), c.sense, c.rhs)
    relaxed.objective = dict(m.objective)
    lp = solve_scipy(relaxed)
    assert -lp.objective == pytest.approx(9.0, abs=1e-8)
    assert any("SOS2" in v for v in check_solution(m, lp.values))


def test_sos2_native_and_fallback_agree():
    m = curve_model()
    converted = convert_sos2_to_adjacency(m)
    a = solve_scipy(m)
    b = solve_scipy(converted)
    assert a.objective == pytest.approx(b.objective, abs=1e-9)


def test_solution_reports_gap_for_mip():
    m = MilpModel()
    x = m.add_variable("x", ub=1.0, kind=BINARY)
    y = m.add_variable("y", ub=5.0)
    m.add_constraint("link", {x: 3.0, y: 1.0}, ">=", 4.0)
    m.add_objective_term(x, 2.0)
    m.add_objective_term(y, 1.0)
    sol = solve_scipy(m, SolveOptions(mip_gap=1e-9))
    assert sol.status == OPTIMAL
    assert sol.gap is not None and sol.gap <= 1e-6
    assert sol.solve_time >= 0.0


# --- checker ---------------------------------------------------------------------


def test_check_solution_flags_violations():
    m = MilpModel()
    x = m.add_variable("x", lb=0.0, ub=1.0)
    z = m.add_variable("z", ub=1.0, kind=BINARY)
    m.add_constraint("row", {x: 1.0, z: 1.0}, "<=", 1.0)
    report = check_solution(m, {"x": 2.0, "z": 0.5})
    assert any("outside" in v for v in report)
    assert any("fractional" in v for v in report)
    assert any("row" in v for v in report)
    assert check_solution(m, {"x": 0.5, "z": 0.0}) == []


def test_check_solution_flags_missing_value():
    m = MilpModel()
    m.add_variable("x")
    assert any("no value" in v for v in check_solution(m, {}))


# --- writers ------------------------------------------------------------------------


EXPECTED_LP = """\\ tiny
Minimize
 obj: 1.5 x - 2 z + 7
Subject To
 c1: 1 x + 2 y <= 10
 c2: 1 x - 3 z >= -2.5
Bounds
 0 <= x <= 10
 y free
 0 <= w <= 5
Binaries
 z
SOS
 s0: S2:: x:1 w:2
End
"""

EXPECTED_MPS = """NAME tiny
ROWS
 N obj
 L c1
 G c2
COLUMNS
 x obj 1.5
 x c1 1
 x c2 1
 y c1 2
 z obj -2
 z c2 -3
 w obj 0
RHS
 rhs obj -7
 rhs c1 10
 rhs c2 -2.5
BOUNDS
 UP bnd x 10
 FR bnd y
 BV bnd z
 UP bnd w 5
SOS
 S2 sos0
    x 1
    w 2
ENDATA
"""


def test_lp_writer_golden():
    assert lp_string(tiny_model()) == EXPECTED_LP


def test_mps_writer_golden():
    assert mps_string(tiny_model()) == EXPECTED_MPS


def test_writers_are_deterministic():
    assert lp_string(tiny_model()) == lp_string(tiny_model())
    assert mps_string(tiny_model()) == mps_string(tiny_model())


def test_writer_rejects_duplicate_row_names():
    m = MilpModel()
    x = m.add_variable("x")
    m.add_constraint("c", {x: 1.0}, "<=", 1.0)
    m.add_constraint("c", {x: 1.0}, ">=", 0.0)
    with pytest.raises(SerializationError, match="duplicate"):
        lp_string(m)


def test_writer_rejects_whitespace_names():
    m = MilpModel()
    m.add_variable("bad name")
    with pytest.raises(SerializationError, match="whitespace"):
        mps_string(m)


# --- external backend --------------------------------------------------------------


FAKE_SOLVER = """#!/usr/bin/env python3
import sys

args = sys.argv[1:]
sol_path = args[args.index("-solution") + 1]
mode = {mode!r}
with open(sol_path, "w") as fh:
    if mode == "optimal":
        fh.write("Optimal - objective value 13\\n")
        fh.write(" 0 x 3 0\\n")
    elif mode == "infeasible":
        fh.write("Infeasible - objective value 0\\n")
    else:
        fh.write("Stopped on time - objective value 14\\n")
        fh.write(" 0 x 4 0\\n")
"""


def fake_solver(tmp_path, mode):
    script = tmp_path / f"fake_{mode}.py"
    script.write_text(FAKE_SOLVER.format(mode=mode))
    script.chmod(script.stat().st_mode | stat.S_IEXEC)
    return [sys.executable, str(script)]


def floor_model() -> MilpModel:
    m = MilpModel()
    x = m.add_variable("x")
    m.add_constraint("floor", {x: 1.0}, ">=", 3.0)
    m.add_objective_term(x, 1.0)
    m.add_objective_constant(10.0)
    return m


def test_external_solver_roundtrip(tmp_path):
    sol = solve_external(floor_model(), fake_solver(tmp_path, "optimal"))
    assert sol.status == OPTIMAL
    assert sol.objective == pytest.approx(13.0)
    assert sol.values == {"x": 3.0}


def test_external_solver_infeasible(tmp_path):
    sol = solve_external(floor_model(), fake_solver(tmp_path, "infeasible"))
    assert sol.status == INFEASIBLE


def test_external_solver_limit_status(tmp_path):
    sol = solve_external(floor_model(), fake_solver(tmp_path, "limit"))
    assert sol.status == "limit"
    assert sol.values["x"] == pytest.approx(4.0)


def test_external_solver_missing_binary():
    with pytest.raises(SolverNotFoundError):
        solve_external(floor_model(), ["/no/such/solver"])


def test_solve_dispatch_uses_env(tmp_path, monkeypatch):
    argv = fake_solver(tmp_path, "optimal")
    monkeypatch.setenv("HUBBID_SOLVER", " ".join(argv))
    sol = solve(floor_model())
    assert sol.objective == pytest.approx(13.0)
    monkeypatch.delenv("HUBBID_SOLVER")
    sol = solve(floor_model())
    assert sol.status == OPTIMAL
    assert sol.objective == pytest.approx(13.0)
