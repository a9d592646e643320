"""Versioned JSON serialization of weighted scenario sets."""

from __future__ import annotations

import json
from datetime import datetime, timezone

from ..domain.types import (
    ExogenousScenario,
    Scenario,
    ScenarioSet,
    TimeGrid,
    WorkloadScenario,
)
from ..errors import InputError

SET_SCHEMA_VERSION = 1

_EXOGENOUS_SERIES = (
    "spot",
    "price_short",
    "price_long",
    "carbon_intensity",
    "renewable_share",
    "ghi",
    "heat_demand",
)


def scenario_set_to_dict(sset: ScenarioSet) -> dict:
    return {
        "schema_version": SET_SCHEMA_VERSION,
        "grid": {
            "step_hours": sset.grid.step_hours,
            "steps_per_day": sset.grid.steps_per_day,
            "start": sset.grid.start.isoformat(),
        },
        "scenarios": [
            {
                "probability": s.probability,
                "exogenous": {
                    name: [float(x) for x in getattr(s.exogenous, name)]
                    for name in _EXOGENOUS_SERIES
                },
                "workload": {
                    "inelastic": [
                        {
                            "cluster": c,
                            "resource": r,
                            "series": [float(x) for x in series],
                        }
                        for (c, r), series in s.workload.inelastic.items()
                    ],
                    "flexible": [
                        {"cluster": c, "resource": r, "total": total}
                        for (c, r), total in s.workload.flexible.items()
                    ],
                },
            }
            for s in sset.scenarios
        ],
    }


def scenario_set_from_dict(doc) -> ScenarioSet:
    if not isinstance(doc, dict):
        raise InputError("$: expected an object")
    version = doc.get("schema_version")
    if version != SET_SCHEMA_VERSION:
        raise InputError(f"$.schema_version: unsupported version {version!r}")
    grid_doc = doc.get("grid")
    if not isinstance(grid_doc, dict):
        raise InputError("grid: missing or not an object")
    try:
        start = datetime.fromisoformat(grid_doc["start"])
    except (KeyError, ValueError, TypeError):
        raise InputError("grid.start: missing or not ISO-8601") from None
    if start.tzinfo is None:
        start = start.replace(tzinfo=timezone.utc)
    try:
        grid = TimeGrid(
            step_hours=float(grid_doc["step_hours"]),
            steps_per_day=int(grid_doc["steps_per_day"]),
            start=start,
        )
    except (KeyError, ValueError, TypeError):
        raise InputError("grid: step_hours/steps_per_day missing or wrong type") from None

    raw = doc.get("scenarios")
    if not isinstance(raw, list) or not raw:
        raise InputError("scenarios: expected a non-empty array")
    scenarios = []
    for i, sdoc in enumerate(raw):
        path = f"scenarios[{i}]"
        if not isinstance(sdoc, dict):
            raise InputError(f"{path}: expected an object")
        exo_doc = sdoc.get("exogenous")
        if not isinstance(exo_doc, dict):
            raise InputError(f"{path}.exogenous: missing or not an object")
        series = {}
        for name in _EXOGENOUS_SERIES:
            if name not in exo_doc:
                raise InputError(f"{path}.exogenous.{name}: missing required series")
            series[name] = exo_doc[name]
        wl_doc = sdoc.get("workload")
        if not isinstance(wl_doc, dict):
            raise InputError(f"{path}.workload: missing or not an object")
        try:
            inelastic = {
                (e["cluster"], e["resource"]): e["series"]
                for e in wl_doc.get("inelastic", [])
            }
            flexible = {
                (e["cluster"], e["resource"]): float(e["total"])
                for e in wl_doc.get("flexible", [])
            }
        except (KeyError, TypeError, ValueError):
            raise InputError(f"{path}.workload: malformed entry") from None
        if "probability" not in sdoc:
            raise InputError(f"{path}.probability: missing required field")
        scenarios.append(
            Scenario(
                exogenous=ExogenousScenario(**series),
                workload=WorkloadScenario(inelastic=inelastic, flexible=flexible),
                probability=float(sdoc["probability"]),
            )
        )
    return ScenarioSet(scenarios=tuple(scenarios), grid=grid)


def save_scenario_set(path: str, sset: ScenarioSet) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scenario_set_to_dict(sset), fh, indent=2)
        fh.write("\n")


def load_scenario_set(path: str) -> ScenarioSet:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise InputError(f"scenario set not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"scenario set {path}: invalid JSON ({exc})") from None
    return scenario_set_from_dict(doc)
