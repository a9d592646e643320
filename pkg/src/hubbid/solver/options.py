"""Solver-facing option and result containers."""

from __future__ import annotations

from dataclasses import dataclass, field

OPTIMAL = "optimal"
LIMIT = "limit"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class SolveOptions:
    """Knobs shared by all backends.

    Backends ignore what they cannot honor (the embedded solver runs single
    threaded and has no seed). ``native_sos2`` lets a backend keep SOS2 sets
    as such; when off they are rewritten with segment binaries before the
    model leaves the process.
    """

    mip_gap: float = 1e-6
    time_limit: float | None = None
    threads: int | None = None
    seed: int | None = None
    native_sos2: bool = True


@dataclass
class Solution:
    """Outcome of one solve: status, objective and a value per variable."""

    status: str
    objective: float | None
    values: dict[str, float] = field(default_factory=dict)
    gap: float | None = None
    solve_time: float = 0.0

    @property
    def ok(self) -> bool:
        return self.status in (OPTIMAL, LIMIT) and bool(self.values)

    def value(self, name: str) -> float:
        return self.values[name]
