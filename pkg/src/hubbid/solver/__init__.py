from .backends import ENV_SOLVER, solve, solve_external, solve_scipy
from .checker import check_solution, solution_invariants
from .options import INFEASIBLE, LIMIT, OPTIMAL, UNBOUNDED, Solution, SolveOptions
from .writers import lp_string, mps_string, write_lp, write_mps

__all__ = [
    "ENV_SOLVER",
    "INFEASIBLE",
    "LIMIT",
    "OPTIMAL",
    "UNBOUNDED",
    "Solution",
    "SolveOptions",
    "check_solution",
    "lp_string",
    "mps_string",
    "solution_invariants",
    "solve",
    "solve_external",
    "solve_scipy",
    "write_lp",
    "write_mps",
]
