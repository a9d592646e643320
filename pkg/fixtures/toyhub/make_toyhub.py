"""Regenerate the committed toy hub fixture.

Writes every input file the manifest references into this directory. All
randomness is seeded, so reruns reproduce the committed files byte for
byte. The hub mirrors a small university data center: two GPU clusters
behind a 300 kW grid connection, with a 250 kW battery, 200 kW of PV and
a small heat engine fed by waste heat.
"""

import json
import os
from datetime import datetime, timezone

import numpy as np

from hubbid import (
    BessSpec,
    ClusterSpec,
    DataCenterSpec,
    EconomicsSpec,
    ExogenousScenario,
    HubSpec,
    OrcCurve,
    PpaContract,
    PvSpec,
    RealizedDay,
    TimeGrid,
    WorkloadScenario,
    save_hub,
    save_realized_day,
)
from hubbid.domain.configio import write_timeseries

HERE = os.path.dirname(os.path.abspath(__file__))
GRID = TimeGrid(1.0, 24, start=datetime(2025, 7, 17, tzinfo=timezone.utc))
HOURS = np.arange(24, dtype=float)


def bell(center, width):
    return np.exp(-(((HOURS - center) / width) ** 2))


def rnd(arr, digits=4):
    return np.round(np.asarray(arr, dtype=float), digits)


# point forecasts: duck-curve spot, solar bell, inverse carbon curve
SPOT = rnd(0.05 + 0.04 * bell(8.5, 2.0) + 0.07 * bell(19.0, 2.2) - 0.035 * bell(13.0, 2.5))
GHI = rnd(np.where((HOURS >= 6) & (HOURS <= 19), 800.0 * bell(13.0, 3.2), 0.0), 1)
SHARE = rnd(0.35 + 0.40 * bell(13.0, 3.5))
CARBON = rnd(0.30 - 0.22 * bell(13.0, 3.5))
HEAT_DEMAND = rnd(30.0 + 45.0 * bell(12.0, 4.0) + 8.0 * bell(19.0, 2.0), 2)

# inelastic usage per (cluster, resource): day-active with an evening dip
WORKLOAD = {
    ("a100", "CPU"): rnd(260.0 + 220.0 * bell(12.5, 3.5) - 120.0 * bell(18.5, 1.6), 2),
    ("a100", "GPU"): rnd(60.0 + 70.0 * bell(13.0, 3.0) - 30.0 * bell(18.5, 1.6), 2),
    ("v100", "CPU"): rnd(120.0 + 150.0 * bell(12.0, 4.0) - 70.0 * bell(18.5, 1.6), 2),
    ("v100", "GPU"): rnd(12.0 + 18.0 * bell(13.0, 3.0) - 6.0 * bell(18.5, 1.6), 2),
}
FLEXIBLE = {("a100", "CPU"): 1500.0, ("a100", "GPU"): 250.0, ("v100", "CPU"): 600.0}

RESIDUAL_SCALE = {
    "spot": 0.012,
    "renewable_share": 0.08,
    "carbon_intensity": 0.04,
    "ghi": 80.0,
    ("a100", "CPU"): 35.0,
    ("a100", "GPU"): 9.0,
    ("v100", "CPU"): 20.0,
    ("v100", "GPU"): 2.0,
}
FLEX_SCALE = {("a100", "CPU"): 220.0, ("a100", "GPU"): 40.0, ("v100", "CPU"): 90.0}
N_HISTORY_DAYS = 12


def make_hub() -> HubSpec:
    clusters = (
        ClusterSpec(
            id="a100",
            capacity={"CPU": 1024.0, "GPU": 256.0, "MEM-CPU": 32768.0, "MEM-GPU": 10240.0},
            rho_intercept=14.0,
            rho_coeff={"CPU": 0.035, "GPU": 0.32},
            mem_ratio={"MEM-CPU": 18.0, "MEM-GPU": 24.0},
            rec_efficiency=0.8,
            rec_idle=2.0,
            cooled_resources=("CPU", "GPU"),
        ),
        ClusterSpec(
            id="v100",
            capacity={"CPU": 576.0, "GPU": 64.0, "MEM-CPU": 6160.0},
            rho_intercept=9.0,
            rho_coeff={"CPU": 0.03, "GPU": 0.25},
            mem_ratio={"MEM-CPU": 8.0},
            rec_efficiency=0.7,
            rec_idle=1.5,
            cooled_resources=("CPU", "GPU"),
        ),
    )
    tariff = np.where((HOURS >= 6) & (HOURS < 22), 0.16, 0.10)
    return HubSpec(
        datacenter=DataCenterSpec(clusters=clusters, pue=1.15),
        ppa=PpaContract(p_gcp_rated=300.0, p_gcp_min=25.0, t_daily_lim=4.0, t_weekly_lim=8.0),
        economics=EconomicsSpec(
            carbon_price=0.1,
            heat_price=0.03,
            cvar_alpha=0.75,
            cvar_beta=0.2,
            tou_tariff=tariff,
        ),
        bess=BessSpec(
            e_min=25.0,
            e_max=225.0,
            e_rated=250.0,
            p_rated=250.0,
            eta_oneway=0.94,
            e_init=125.0,
            rated_cycles=6000.0,
            investment_cost=90000.0,
            lca_emissions=20000.0,
        ),
        pv=PvSpec(p_rated=200.0, ghi_ref=1000.0),
        orc=OrcCurve(samples=((0.0, 0.0), (25.0, 2.2), (50.0, 4.8), (75.0, 7.3), (100.0, 9.5))),
    )


def write_forecast(path, spot, share):
    write_timeseries(
        path,
        GRID,
        {
            "spot": spot,
            "renewable_share": share,
            "carbon_intensity": CARBON,
            "ghi": GHI,
            "heat_demand": HEAT_DEMAND,
        },
    )


def write_residuals(rng):
    rdir = os.path.join(HERE, "residuals")
    for name, forecast in (
        ("spot", SPOT),
        ("renewable_share", SHARE),
        ("carbon_intensity", CARBON),
        ("ghi", GHI),
    ):
        rows = rnd(rng.normal(0.0, RESIDUAL_SCALE[name], size=(N_HISTORY_DAYS, 24)))
        _write_matrix(os.path.join(rdir, f"{name}.csv"), rows)
    for key, series in WORKLOAD.items():
        rows = rnd(rng.normal(0.0, RESIDUAL_SCALE[key], size=(N_HISTORY_DAYS, 24)), 2)
        path = os.path.join(rdir, "inelastic", key[0], f"{key[1]}.csv")
        _write_matrix(path, rows)
    for key, scale in FLEX_SCALE.items():
        rows = rnd(rng.normal(0.0, scale, size=(N_HISTORY_DAYS, 1)), 2)
        path = os.path.join(rdir, "flexible", key[0], f"{key[1]}.csv")
        _write_matrix(path, rows)


def _write_matrix(path, rows):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(f"h{t}" for t in range(rows.shape[1])) + "\n")
        for row in rows:
            fh.write(",".join(repr(float(x)) for x in row) + "\n")


def write_imbalance_history(rng):
    n = 240
    spot = rnd(np.exp(rng.normal(np.log(0.08), 0.35, size=n)))
    short = rnd(spot * (1.05 + np.abs(rng.normal(0.25, 0.15, size=n))))
    long_ = rnd(spot * np.clip(rng.normal(0.62, 0.18, size=n), 0.05, 0.98))
    hist_grid = TimeGrid(1.0, 24, start=datetime(2025, 6, 1, tzinfo=timezone.utc))
    write_timeseries(
        os.path.join(HERE, "imbalance.csv"),
        hist_grid,
        {"spot": spot, "price_short": short, "price_long": long_},
    )


def write_caps():
    cap = np.full(24, 300.0)
    cap[17] = 75.0
    cap[18] = 25.0
    cap[19] = 25.0
    cap[20] = 50.0
    write_timeseries(os.path.join(HERE, "caps.csv"), GRID, {"cap_kw": cap})


def realized_from(rng, spot, share, date):
    def jitter(series, scale, lo=None, hi=None, digits=4):
        out = np.asarray(series, dtype=float) + rng.normal(0.0, scale, size=24)
        if lo is not None or hi is not None:
            out = np.clip(out, lo if lo is not None else -np.inf, hi if hi is not None else np.inf)
        return rnd(out, digits)

    exogenous = ExogenousScenario(
        spot=jitter(spot, RESIDUAL_SCALE["spot"]),
        price_short=rnd(np.asarray(spot) * 1.32),
        price_long=rnd(np.asarray(spot) * 0.61),
        carbon_intensity=jitter(CARBON, RESIDUAL_SCALE["carbon_intensity"], lo=0.0),
        renewable_share=jitter(share, RESIDUAL_SCALE["renewable_share"], lo=0.0, hi=1.0),
        ghi=jitter(GHI, RESIDUAL_SCALE["ghi"], lo=0.0, digits=1),
        heat_demand=HEAT_DEMAND,
    )
    workload = WorkloadScenario(
        inelastic={
            key: jitter(series, RESIDUAL_SCALE[key], lo=0.0, digits=2)
            for key, series in WORKLOAD.items()
        },
        flexible={
            key: float(max(0.0, round(total + rng.normal(0.0, FLEX_SCALE[key]), 2)))
            for key, total in FLEXIBLE.items()
        },
    )
    return RealizedDay(exogenous=exogenous, workload=workload, date=date)


def write_manifest():
    doc = {
        "schema_version": 1,
        "hub": "hub.json",
        "output_dir": "out",
        "seed": 20250717,
        "solver": {"mip_gap": 1e-4},
        "scenarios": {
            "forecast": "forecast.csv",
            "workload_forecast": "workload.csv",
            "residual_dir": "residuals",
            "imbalance": {"history": "imbalance.csv", "target": 0.4},
            "flexible_totals": {f"{c}/{r}": v for (c, r), v in FLEXIBLE.items()},
            "n_per_param": 12,
            "n_combos": 400,
            "k": 6,
            "file": "scenarios.json",
        },
        "derating": "caps.csv",
        "bid": {"scheme": "custom"},
        "evaluate": {"schemes": ["custom", "tou", "custom_noflex"], "jobs": 2},
        "days": {"dir": "days", "list": ["2025-07-17", "2025-07-18"]},
    }
    with open(os.path.join(HERE, "manifest.json"), "w", newline="\n") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")

    # infeasible variant: full renewable coverage demanded of a fossil grid
    doc_scap = dict(doc)
    doc_scap["hub"] = "hub_scap1.json"
    doc_scap["output_dir"] = "out_scap1"
    doc_scap["scenarios"] = dict(doc["scenarios"], forecast="forecast_fossil.csv")
    del doc_scap["days"]
    doc_scap["evaluate"] = {"schemes": ["custom"]}
    with open(os.path.join(HERE, "manifest_scap1.json"), "w", newline="\n") as fh:
        json.dump(doc_scap, fh, indent=2)
        fh.write("\n")


def main():
    hub = make_hub()
    save_hub(os.path.join(HERE, "hub.json"), hub, GRID)

    import dataclasses

    hub_scap1 = dataclasses.replace(
        hub,
        economics=dataclasses.replace(
            hub.economics, renewable_target=1.0, renewable_alpha=0.0
        ),
    )
    save_hub(os.path.join(HERE, "hub_scap1.json"), hub_scap1, GRID)

    write_forecast(os.path.join(HERE, "forecast.csv"), SPOT, SHARE)
    write_forecast(
        os.path.join(HERE, "forecast_fossil.csv"), SPOT, np.zeros(24)
    )
    write_timeseries(
        os.path.join(HERE, "workload.csv"),
        GRID,
        {f"{c}/{r}": series for (c, r), series in WORKLOAD.items()},
    )
    write_caps()

    rng = np.random.default_rng(424242)
    write_residuals(rng)
    write_imbalance_history(rng)

    # two delivery days: the second sees a pricier evening than forecast
    day2_spot = rnd(SPOT * 1.15)
    os.makedirs(os.path.join(HERE, "days", "2025-07-17"), exist_ok=True)
    os.makedirs(os.path.join(HERE, "days", "2025-07-18"), exist_ok=True)
    write_forecast(os.path.join(HERE, "days", "2025-07-18", "forecast.csv"), day2_spot, SHARE)
    save_realized_day(
        os.path.join(HERE, "days", "2025-07-17", "realized.json"),
        realized_from(rng, SPOT, SHARE, "2025-07-17"),
        GRID,
    )
    save_realized_day(
        os.path.join(HERE, "days", "2025-07-18", "realized.json"),
        realized_from(rng, day2_spot, SHARE, "2025-07-18"),
        GRID,
    )
    write_manifest()
    print(f"fixture written under {HERE}")


if __name__ == "__main__":
    main()
