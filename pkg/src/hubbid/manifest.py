"""Run manifests: one versioned JSON document driving the batch pipeline.

A manifest names the hub configuration, the scenario input files, an
optional de-rating profile and the output directory, plus the seed and
solver options shared by every step. All relative paths are resolved
against the directory containing the manifest file, so a manifest and its
data can be moved around as one folder.

Multi-day batches declare a ``days`` section; per-day input files live in
``<days.dir>/<day>/`` and override same-named base files, everything else
is inherited. Day ``i`` of the declared list runs with ``seed + i``.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .domain.configio import (
    _integer,
    _number,
    _number_map,
    _require,
    _string,
    read_timeseries,
)
from .domain.types import DeratingProfile, HubSpec, RealizedDay, TimeGrid
from .errors import InputError
from .scenarios.imbalance import ImbalanceFactors, calibrate_imbalance_factors
from .scenarios.pipeline import EXOGENOUS_PARAMS, ScenarioInputs
from .scenarios.residuals import ResidualHistory
from .scenarios.setio import scenario_set_from_dict, scenario_set_to_dict
from .solver.options import SolveOptions

MANIFEST_SCHEMA_VERSION = 1

# forecast CSV columns beyond the timestamp; heat demand is deterministic
FORECAST_COLUMNS = EXOGENOUS_PARAMS + ("heat_demand",)


def _resource_key(raw: str, path: str) -> tuple[str, str]:
    """Split a ``cluster/resource`` key, e.g. ``c0/CPU``."""
    name = _string(raw, path)
    cluster, sep, res = name.rpartition("/")
    if not sep or not cluster or not res:
        raise InputError(f"{path}: expected '<cluster>/<resource>', got {name!r}")
    return cluster, res


@dataclass(frozen=True)
class ImbalanceConfig:
    """Either explicit spot multipliers or a history file to calibrate them."""

    history: str | None = None
    target: float = 0.4
    k_short: float | None = None
    k_long: float | None = None

    def factors(self, resolve) -> ImbalanceFactors:
        if self.k_short is not None:
            return ImbalanceFactors(k_short=self.k_short, k_long=self.k_long)
        hist = read_timeseries(resolve(self.history))
        for col in ("spot", "price_short", "price_long"):
            if col not in hist:
                raise InputError(f"{self.history}: missing column {col!r}")
        return calibrate_imbalance_factors(
            hist["spot"], hist["price_short"], hist["price_long"], self.target
        )


@dataclass(frozen=True)
class ScenarioConfig:
    forecast: str
    workload_forecast: str
    residual_dir: str
    imbalance: ImbalanceConfig
    flexible_totals: dict[tuple[str, str], float] = field(default_factory=dict)
    n_per_param: int = 40
    n_combos: int = 1000
    k: int = 60
    file: str = "scenarios.json"


@dataclass(frozen=True)
class BidConfig:
    scheme: str = "custom"
    vcc_quantile: float | None = None
    write_lp: bool = False
    file: str = "bid.json"


@dataclass(frozen=True)
class EvaluateConfig:
    realized: tuple[str, ...] = ()
    schemes: tuple[str, ...] = ("custom",)
    jobs: int = 1


@dataclass(frozen=True)
class DaysConfig:
    dir: str
    days: tuple[str, ...]


@dataclass(frozen=True)
class RunManifest:
    """Parsed manifest plus the directory its relative paths anchor to."""

    base_dir: str
    hub: str
    output_dir: str
    seed: int = 0
    solver: SolveOptions = field(default_factory=SolveOptions)
    scenarios: ScenarioConfig | None = None
    derating: str | None = None
    bid: BidConfig = field(default_factory=BidConfig)
    evaluate: EvaluateConfig = field(default_factory=EvaluateConfig)
    days: DaysConfig | None = None

    def resolve(self, path: str) -> str:
        if os.path.isabs(path):
            return path
        return os.path.join(self.base_dir, path)

    def out_dir(self, day: str | None = None) -> str:
        base = self.resolve(self.output_dir)
        return base if day is None else os.path.join(base, day)

    def day_file(self, base_path: str, day: str | None) -> str:
        """Per-day override of an input file, falling back to the base path.

        The override is ``<days.dir>/<day>/<basename>``; only its presence on
        disk selects it, so days carry just the files that actually differ.
        """
        if day is not None and self.days is not None:
            candidate = os.path.join(
                self.resolve(self.days.dir), day, os.path.basename(base_path)
            )
            if os.path.exists(candidate):
                return candidate
        return self.resolve(base_path)

    def day_seed(self, day: str | None) -> int:
        if day is None or self.days is None:
            return self.seed
        return self.seed + self.days.days.index(day)


def _parse_imbalance(doc, path: str) -> ImbalanceConfig:
    if not isinstance(doc, dict):
        raise InputError(f"{path}: expected an object")
    if "k_short" in doc or "k_long" in doc:
        return ImbalanceConfig(
            k_short=_number(_require(doc, "k_short", path), f"{path}.k_short"),
            k_long=_number(_require(doc, "k_long", path), f"{path}.k_long"),
        )
    cfg = ImbalanceConfig(
        history=_string(_require(doc, "history", path), f"{path}.history"),
        target=(
            _number(doc["target"], f"{path}.target") if "target" in doc else 0.4
        ),
    )
    if not 0.0 < cfg.target < 1.0:
        raise InputError(f"{path}.target: must lie in (0, 1)")
    return cfg


def _parse_scenarios(doc, path: str) -> ScenarioConfig:
    totals_doc = doc.get("flexible_totals", {})
    totals = {
        _resource_key(k, f"{path}.flexible_totals.{k}"): v
        for k, v in _number_map(totals_doc, f"{path}.flexible_totals").items()
    }
    cfg = ScenarioConfig(
        forecast=_string(_require(doc, "forecast", path), f"{path}.forecast"),
        workload_forecast=_string(
            _require(doc, "workload_forecast", path), f"{path}.workload_forecast"
        ),
        residual_dir=_string(
            _require(doc, "residual_dir", path), f"{path}.residual_dir"
        ),
        imbalance=_parse_imbalance(_require(doc, "imbalance", path), f"{path}.imbalance"),
        flexible_totals=totals,
        n_per_param=_integer(doc.get("n_per_param", 40), f"{path}.n_per_param"),
        n_combos=_integer(doc.get("n_combos", 1000), f"{path}.n_combos"),
        k=_integer(doc.get("k", 60), f"{path}.k"),
        file=_string(doc.get("file", "scenarios.json"), f"{path}.file"),
    )
    for name, value in (
        ("n_per_param", cfg.n_per_param),
        ("n_combos", cfg.n_combos),
        ("k", cfg.k),
    ):
        if value < 1:
            raise InputError(f"{path}.{name}: must be >= 1")
    return cfg


def _parse_bid(doc, path: str) -> BidConfig:
    if not isinstance(doc, dict):
        raise InputError(f"{path}: expected an object")
    scheme = _string(doc.get("scheme", "custom"), f"{path}.scheme")
    if scheme not in ("custom", "tou"):
        raise InputError(f"{path}.scheme: expected 'custom' or 'tou', got {scheme!r}")
    quantile = doc.get("vcc_quantile")
    if quantile is not None:
        quantile = _number(quantile, f"{path}.vcc_quantile")
    write_lp = doc.get("write_lp", False)
    if not isinstance(write_lp, bool):
        raise InputError(f"{path}.write_lp: expected a boolean")
    return BidConfig(
        scheme=scheme,
        vcc_quantile=quantile,
        write_lp=write_lp,
        file=_string(doc.get("file", "bid.json"), f"{path}.file"),
    )


def _parse_evaluate(doc, path: str) -> EvaluateConfig:
    if not isinstance(doc, dict):
        raise InputError(f"{path}: expected an object")
    realized = doc.get("realized", [])
    if isinstance(realized, str):
        realized = [realized]
    if not isinstance(realized, list):
        raise InputError(f"{path}.realized: expected a path or array of paths")
    realized = tuple(
        _string(p, f"{path}.realized[{i}]") for i, p in enumerate(realized)
    )
    schemes_doc = doc.get("schemes", ["custom"])
    if not isinstance(schemes_doc, list) or not schemes_doc:
        raise InputError(f"{path}.schemes: expected a non-empty array")
    schemes = tuple(
        _string(s, f"{path}.schemes[{i}]") for i, s in enumerate(schemes_doc)
    )
    jobs = _integer(doc.get("jobs", 1), f"{path}.jobs")
    if jobs < 1:
        raise InputError(f"{path}.jobs: must be >= 1")
    return EvaluateConfig(realized=realized, schemes=schemes, jobs=jobs)


def _parse_days(doc, path: str) -> DaysConfig:
    if not isinstance(doc, dict):
        raise InputError(f"{path}: expected an object")
    days_doc = _require(doc, "list", path)
    if not isinstance(days_doc, list) or not days_doc:
        raise InputError(f"{path}.list: expected a non-empty array")
    days = tuple(_string(d, f"{path}.list[{i}]") for i, d in enumerate(days_doc))
    if len(set(days)) != len(days):
        raise InputError(f"{path}.list: duplicate day names")
    return DaysConfig(
        dir=_string(doc.get("dir", "days"), f"{path}.dir"),
        days=days,
    )


def _parse_solver(doc, path: str) -> SolveOptions:
    if not isinstance(doc, dict):
        raise InputError(f"{path}: expected an object")
    kwargs = {}
    if "mip_gap" in doc:
        kwargs["mip_gap"] = _number(doc["mip_gap"], f"{path}.mip_gap")
    if "time_limit" in doc and doc["time_limit"] is not None:
        kwargs["time_limit"] = _number(doc["time_limit"], f"{path}.time_limit")
    if "threads" in doc and doc["threads"] is not None:
        kwargs["threads"] = _integer(doc["threads"], f"{path}.threads")
    if "native_sos2" in doc:
        if not isinstance(doc["native_sos2"], bool):
            raise InputError(f"{path}.native_sos2: expected a boolean")
        kwargs["native_sos2"] = doc["native_sos2"]
    return SolveOptions(**kwargs)


def manifest_from_dict(doc, base_dir: str = ".") -> RunManifest:
    if not isinstance(doc, dict):
        raise InputError("$: expected an object")
    version = doc.get("schema_version")
    if version != MANIFEST_SCHEMA_VERSION:
        raise InputError(f"$.schema_version: unsupported version {version!r}")
    man = RunManifest(
        base_dir=base_dir,
        hub=_string(_require(doc, "hub", "$"), "$.hub"),
        output_dir=_string(_require(doc, "output_dir", "$"), "$.output_dir"),
        seed=_integer(doc.get("seed", 0), "$.seed"),
        solver=_parse_solver(doc.get("solver", {}), "solver"),
        scenarios=(
            _parse_scenarios(_require(doc, "scenarios", "$"), "scenarios")
            if "scenarios" in doc
            else None
        ),
        derating=(
            _string(doc["derating"], "$.derating") if "derating" in doc else None
        ),
        bid=_parse_bid(doc.get("bid", {}), "bid"),
        evaluate=_parse_evaluate(doc.get("evaluate", {}), "evaluate"),
        days=_parse_days(doc["days"], "days") if "days" in doc else None,
    )
    return man


def load_manifest(path: str) -> RunManifest:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise InputError(f"manifest not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"manifest {path}: invalid JSON ({exc})") from None
    return manifest_from_dict(doc, base_dir=os.path.dirname(os.path.abspath(path)))


# --- wiring manifests to the scenario pipeline ------------------------------------


def _series_of(table, name: str, steps: int, origin: str) -> np.ndarray:
    if name not in table:
        raise InputError(f"{origin}: missing column {name!r}")
    series = table[name]
    if len(series) != steps:
        raise InputError(
            f"{origin}: column {name!r} has {len(series)} rows, grid has {steps}"
        )
    return series


def load_scenario_inputs(
    man: RunManifest, spec: HubSpec, grid: TimeGrid, day: str | None = None
) -> ScenarioInputs:
    """Assemble the generation inputs for one day from the manifest's files."""
    cfg = man.scenarios
    if cfg is None:
        raise InputError("manifest has no 'scenarios' section")
    steps = grid.steps_per_day

    fc_path = man.day_file(cfg.forecast, day)
    table = read_timeseries(fc_path)
    forecasts = {
        name: _series_of(table, name, steps, fc_path) for name in EXOGENOUS_PARAMS
    }
    heat = _series_of(table, "heat_demand", steps, fc_path)

    wl_path = man.day_file(cfg.workload_forecast, day)
    wl_table = read_timeseries(wl_path)
    inelastic = {}
    for col in wl_table:
        if col == "timestamp":
            continue
        key = _resource_key(col, f"{wl_path}: column {col!r}")
        inelastic[key] = _series_of(wl_table, col, steps, wl_path)
    if not inelastic:
        raise InputError(f"{wl_path}: no workload columns")

    rdir = man.resolve(cfg.residual_dir)
    residuals = {
        name: ResidualHistory.from_csv(os.path.join(rdir, f"{name}.csv"))
        for name in EXOGENOUS_PARAMS
    }
    inelastic_res = {
        (c, r): ResidualHistory.from_csv(os.path.join(rdir, "inelastic", c, f"{r}.csv"))
        for (c, r) in inelastic
    }
    flexible_res = {
        (c, r): ResidualHistory.from_csv(os.path.join(rdir, "flexible", c, f"{r}.csv"))
        for (c, r) in cfg.flexible_totals
    }

    return ScenarioInputs(
        grid=grid,
        forecasts=forecasts,
        residuals=residuals,
        inelastic_forecasts=inelastic,
        inelastic_residuals=inelastic_res,
        imbalance=cfg.imbalance.factors(man.resolve),
        heat_demand=heat,
        flexible_forecasts=dict(cfg.flexible_totals),
        flexible_residuals=flexible_res,
    )


def load_caps(
    man: RunManifest, grid: TimeGrid, day: str | None = None
) -> DeratingProfile | None:
    """Read the de-rating profile CSV (``timestamp,cap_kw``), if declared."""
    if man.derating is None:
        return None
    path = man.day_file(man.derating, day)
    table = read_timeseries(path)
    if "cap_kw" not in table:
        raise InputError(f"{path}: missing column 'cap_kw'")
    return DeratingProfile(table["cap_kw"])


# --- realized-day files ------------------------------------------------------------


def load_realized_day(path: str) -> RealizedDay:
    """Read one realized day: a single-scenario set document plus a date."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise InputError(f"realized day not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"realized day {path}: invalid JSON ({exc})") from None
    sset = scenario_set_from_dict(doc)
    if len(sset.scenarios) != 1:
        raise InputError(
            f"{path}: a realized day must hold exactly one scenario, "
            f"got {len(sset.scenarios)}"
        )
    date = doc.get("date", "")
    if not isinstance(date, str):
        raise InputError(f"{path}: 'date' must be a string")
    scen = sset.scenarios[0]
    return RealizedDay(exogenous=scen.exogenous, workload=scen.workload, date=date)


def save_realized_day(path: str, realized: RealizedDay, grid: TimeGrid) -> None:
    from .domain.types import ScenarioSet

    doc = scenario_set_to_dict(
        ScenarioSet.single(realized.exogenous, realized.workload, grid)
    )
    doc["date"] = realized.date
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
