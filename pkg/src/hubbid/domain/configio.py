"""Hub configuration JSON and time-series CSV input/output.

The hub configuration is a single versioned JSON document holding the time
grid, the data-center description, the grid-connection contract, prices and
risk settings, and the optional DER blocks (battery, PV, heat engine). Schema
violations raise :class:`~hubbid.errors.InputError` carrying the path of the
offending field, e.g. ``datacenter.clusters[1].capacity.CPU``.
"""

from __future__ import annotations

import csv
import json
from datetime import datetime, timezone
from typing import Mapping, Sequence

import numpy as np

from ..errors import InputError
from .types import (
    BessSpec,
    ClusterSpec,
    DataCenterSpec,
    EconomicsSpec,
    HubSpec,
    OrcCurve,
    PpaContract,
    PvSpec,
    TimeGrid,
)

HUB_SCHEMA_VERSION = 1


def _require(doc, key: str, path: str):
    if not isinstance(doc, dict):
        raise InputError(f"{path}: expected an object")
    if key not in doc:
        raise InputError(f"{path}.{key}: missing required field")
    return doc[key]


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InputError(f"{path}: expected a number")
    return float(value)


def _integer(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InputError(f"{path}: expected an integer")
    return value


def _string(value, path: str) -> str:
    if not isinstance(value, str):
        raise InputError(f"{path}: expected a string")
    return value


def _number_map(value, path: str) -> dict[str, float]:
    if not isinstance(value, dict):
        raise InputError(f"{path}: expected an object")
    return {k: _number(v, f"{path}.{k}") for k, v in value.items()}


def _number_list(value, path: str) -> list[float]:
    if not isinstance(value, list):
        raise InputError(f"{path}: expected an array")
    return [_number(v, f"{path}[{i}]") for i, v in enumerate(value)]


def _parse_grid(doc, path: str) -> TimeGrid:
    start_raw = _string(_require(doc, "start", path), f"{path}.start")
    try:
        start = datetime.fromisoformat(start_raw)
    except ValueError:
        raise InputError(f"{path}.start: not an ISO-8601 timestamp") from None
    if start.tzinfo is None:
        start = start.replace(tzinfo=timezone.utc)
    return TimeGrid(
        step_hours=_number(_require(doc, "step_hours", path), f"{path}.step_hours"),
        steps_per_day=_integer(
            _require(doc, "steps_per_day", path), f"{path}.steps_per_day"
        ),
        start=start,
    )


def _parse_cluster(doc, path: str) -> ClusterSpec:
    cooled = doc.get("cooled_resources", [])
    if not isinstance(cooled, list):
        raise InputError(f"{path}.cooled_resources: expected an array")
    return ClusterSpec(
        id=_string(_require(doc, "id", path), f"{path}.id"),
        capacity=_number_map(_require(doc, "capacity", path), f"{path}.capacity"),
        rho_intercept=_number(
            _require(doc, "rho_intercept", path), f"{path}.rho_intercept"
        ),
        rho_coeff=_number_map(_require(doc, "rho_coeff", path), f"{path}.rho_coeff"),
        mem_ratio=_number_map(_require(doc, "mem_ratio", path), f"{path}.mem_ratio"),
        rec_efficiency=_number(doc.get("rec_efficiency", 0.0), f"{path}.rec_efficiency"),
        rec_idle=_number(doc.get("rec_idle", 0.0), f"{path}.rec_idle"),
        cooled_resources=tuple(
            _string(r, f"{path}.cooled_resources[{i}]") for i, r in enumerate(cooled)
        ),
    )


def _parse_datacenter(doc, path: str) -> DataCenterSpec:
    clusters_raw = _require(doc, "clusters", path)
    if not isinstance(clusters_raw, list):
        raise InputError(f"{path}.clusters: expected an array")
    return DataCenterSpec(
        clusters=tuple(
            _parse_cluster(c, f"{path}.clusters[{i}]") for i, c in enumerate(clusters_raw)
        ),
        pue=_number(_require(doc, "pue", path), f"{path}.pue"),
        gamma_inelastic=_number(doc.get("gamma_inelastic", 1.0), f"{path}.gamma_inelastic"),
        gamma_flexible=_number(doc.get("gamma_flexible", 1.0), f"{path}.gamma_flexible"),
    )


def _parse_economics(doc, path: str) -> EconomicsSpec:
    tariff = doc.get("tou_tariff")
    return EconomicsSpec(
        carbon_price=_number(_require(doc, "carbon_price", path), f"{path}.carbon_price"),
        heat_price=_number(_require(doc, "heat_price", path), f"{path}.heat_price"),
        renewable_target=_number(doc.get("renewable_target", 0.0), f"{path}.renewable_target"),
        renewable_alpha=_number(doc.get("renewable_alpha", 1.0), f"{path}.renewable_alpha"),
        cvar_alpha=_number(doc.get("cvar_alpha", 0.95), f"{path}.cvar_alpha"),
        cvar_beta=_number(doc.get("cvar_beta", 0.0), f"{path}.cvar_beta"),
        tou_tariff=None if tariff is None else _number_list(tariff, f"{path}.tou_tariff"),
    )


def _parse_bess(doc, path: str) -> BessSpec:
    return BessSpec(
        e_min=_number(_require(doc, "e_min", path), f"{path}.e_min"),
        e_max=_number(_require(doc, "e_max", path), f"{path}.e_max"),
        e_rated=_number(_require(doc, "e_rated", path), f"{path}.e_rated"),
        p_rated=_number(_require(doc, "p_rated", path), f"{path}.p_rated"),
        eta_oneway=_number(_require(doc, "eta_oneway", path), f"{path}.eta_oneway"),
        e_init=_number(_require(doc, "e_init", path), f"{path}.e_init"),
        rated_cycles=_number(_require(doc, "rated_cycles", path), f"{path}.rated_cycles"),
        investment_cost=_number(doc.get("investment_cost", 0.0), f"{path}.investment_cost"),
        lca_emissions=_number(doc.get("lca_emissions", 0.0), f"{path}.lca_emissions"),
    )


def _parse_orc(doc, path: str) -> OrcCurve:
    samples_raw = _require(doc, "samples", path)
    if not isinstance(samples_raw, list):
        raise InputError(f"{path}.samples: expected an array")
    samples = []
    for i, pair in enumerate(samples_raw):
        if not isinstance(pair, list) or len(pair) != 2:
            raise InputError(f"{path}.samples[{i}]: expected a [heat_kw, power_kw] pair")
        samples.append(
            (
                _number(pair[0], f"{path}.samples[{i}][0]"),
                _number(pair[1], f"{path}.samples[{i}][1]"),
            )
        )
    return OrcCurve(samples=tuple(samples))


def hub_from_dict(doc) -> tuple[HubSpec, TimeGrid]:
    """Parse an already-loaded hub configuration document."""
    version = _require(doc, "schema_version", "$")
    if version != HUB_SCHEMA_VERSION:
        raise InputError(f"$.schema_version: unsupported version {version!r}")
    grid = _parse_grid(_require(doc, "grid", "$"), "grid")
    bess = doc.get("bess")
    pv = doc.get("pv")
    orc = doc.get("orc")
    spec = HubSpec(
        datacenter=_parse_datacenter(_require(doc, "datacenter", "$"), "datacenter"),
        ppa=PpaContract(
            p_gcp_rated=_number(_require(_require(doc, "ppa", "$"), "p_gcp_rated", "ppa"), "ppa.p_gcp_rated"),
            p_gcp_min=_number(_require(doc["ppa"], "p_gcp_min", "ppa"), "ppa.p_gcp_min"),
            t_daily_lim=_number(_require(doc["ppa"], "t_daily_lim", "ppa"), "ppa.t_daily_lim"),
            t_weekly_lim=_number(_require(doc["ppa"], "t_weekly_lim", "ppa"), "ppa.t_weekly_lim"),
        ),
        economics=_parse_economics(_require(doc, "economics", "$"), "economics"),
        bess=None if bess is None else _parse_bess(bess, "bess"),
        pv=None
        if pv is None
        else PvSpec(
            p_rated=_number(_require(pv, "p_rated", "pv"), "pv.p_rated"),
            ghi_ref=_number(pv.get("ghi_ref", 1000.0), "pv.ghi_ref"),
        ),
        orc=None if orc is None else _parse_orc(orc, "orc"),
    )
    return spec, grid


def hub_to_dict(spec: HubSpec, grid: TimeGrid) -> dict:
    doc: dict = {
        "schema_version": HUB_SCHEMA_VERSION,
        "grid": {
            "step_hours": grid.step_hours,
            "steps_per_day": grid.steps_per_day,
            "start": grid.start.isoformat(),
        },
        "datacenter": {
            "pue": spec.datacenter.pue,
            "gamma_inelastic": spec.datacenter.gamma_inelastic,
            "gamma_flexible": spec.datacenter.gamma_flexible,
            "clusters": [
                {
                    "id": c.id,
                    "capacity": dict(c.capacity),
                    "rho_intercept": c.rho_intercept,
                    "rho_coeff": dict(c.rho_coeff),
                    "mem_ratio": dict(c.mem_ratio),
                    "rec_efficiency": c.rec_efficiency,
                    "rec_idle": c.rec_idle,
                    "cooled_resources": list(c.cooled_resources),
                }
                for c in spec.datacenter.clusters
            ],
        },
        "ppa": {
            "p_gcp_rated": spec.ppa.p_gcp_rated,
            "p_gcp_min": spec.ppa.p_gcp_min,
            "t_daily_lim": spec.ppa.t_daily_lim,
            "t_weekly_lim": spec.ppa.t_weekly_lim,
        },
        "economics": {
            "carbon_price": spec.economics.carbon_price,
            "heat_price": spec.economics.heat_price,
            "renewable_target": spec.economics.renewable_target,
            "renewable_alpha": spec.economics.renewable_alpha,
            "cvar_alpha": spec.economics.cvar_alpha,
            "cvar_beta": spec.economics.cvar_beta,
            "tou_tariff": None
            if spec.economics.tou_tariff is None
            else [float(x) for x in spec.economics.tou_tariff],
        },
    }
    if spec.bess is not None:
        b = spec.bess
        doc["bess"] = {
            "e_min": b.e_min,
            "e_max": b.e_max,
            "e_rated": b.e_rated,
            "p_rated": b.p_rated,
            "eta_oneway": b.eta_oneway,
            "e_init": b.e_init,
            "rated_cycles": b.rated_cycles,
            "investment_cost": b.investment_cost,
            "lca_emissions": b.lca_emissions,
        }
    if spec.pv is not None:
        doc["pv"] = {"p_rated": spec.pv.p_rated, "ghi_ref": spec.pv.ghi_ref}
    if spec.orc is not None:
        doc["orc"] = {"samples": [[q, p] for q, p in spec.orc.samples]}
    return doc


def load_hub(path: str) -> tuple[HubSpec, TimeGrid]:
    """Read a hub configuration JSON file."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise InputError(f"hub config not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"hub config {path}: invalid JSON ({exc})") from None
    return hub_from_dict(doc)


def save_hub(path: str, spec: HubSpec, grid: TimeGrid) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(hub_to_dict(spec, grid), fh, indent=2)
        fh.write("\n")


def grid_timestamps(grid: TimeGrid, steps: int | None = None) -> list[str]:
    """ISO-8601 UTC timestamps for each step, starting at ``grid.start``."""
    import datetime as _dt

    n = grid.steps_per_day if steps is None else steps
    delta = _dt.timedelta(hours=grid.step_hours)
    return [(grid.start + i * delta).isoformat() for i in range(n)]


def read_timeseries(path: str) -> dict[str, np.ndarray]:
    """Read a ``timestamp,<series>`` CSV into a map column -> float array.

    Timestamps are returned under the key ``"timestamp"`` as an object array
    of ISO strings; every other column is parsed as float.
    """
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise InputError(f"{path}: empty file") from None
            if not header or header[0] != "timestamp":
                raise InputError(f"{path}: first column must be 'timestamp'")
            rows = list(reader)
    except FileNotFoundError:
        raise InputError(f"time-series file not found: {path}") from None

    out: dict[str, np.ndarray] = {}
    stamps = [r[0] for r in rows]
    out["timestamp"] = np.array(stamps, dtype=object)
    for j, name in enumerate(header[1:], start=1):
        try:
            out[name] = np.array([float(r[j]) for r in rows])
        except (ValueError, IndexError):
            raise InputError(f"{path}: column {name!r} has a non-numeric or missing value") from None
    return out


def write_timeseries(
    path: str, grid: TimeGrid, columns: Mapping[str, Sequence[float]]
) -> None:
    """Write per-step series to a ``timestamp,<series>`` CSV."""
    names = list(columns)
    series = [np.asarray(columns[n], dtype=float) for n in names]
    steps = len(series[0]) if series else grid.steps_per_day
    if any(len(s) != steps for s in series):
        raise InputError("all series must have equal length")
    stamps = grid_timestamps(grid, steps)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["timestamp"] + names)
        for i in range(steps):
            writer.writerow([stamps[i]] + [repr(float(s[i])) for s in series])
