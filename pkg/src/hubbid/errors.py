"""Exception hierarchy shared across the package."""

from __future__ import annotations


class HubbidError(Exception):
    """Base class for all hubbid errors."""


class InputError(HubbidError):
    """Invalid or inconsistent input (bad file, schema violation, bad argument)."""


class FitError(HubbidError):
    """A regression or calibration could not be performed on the given data."""


class BuildError(HubbidError):
    """Model assembly failed (dimension mismatch, missing prerequisite block)."""


class SerializationError(HubbidError):
    """A model could not be written to an interchange format."""


class SolverNotFoundError(HubbidError):
    """No solver backend is available or configured."""


class BackendError(HubbidError):
    """The solver backend failed or produced unparseable output."""

    def __init__(self, message: str, raw_output: str | None = None):
        super().__init__(message)
        self.raw_output = raw_output


class PlanningInfeasibleError(HubbidError):
    """The planning problem is infeasible; ``hint`` names the relaxation that restores feasibility."""

    def __init__(self, message: str, hint: str | None = None):
        super().__init__(message)
        self.hint = hint


class SolutionIntegrityError(HubbidError):
    """A returned solution violates model constraints beyond tolerance."""
