"""Plan one delivery day for a small compute hub and read the bid.

A single CPU cluster with a battery faces three price scenarios for
tomorrow. The planner turns that into an hourly day-ahead bid, a virtual
capacity curve for the real-time scheduler, and a cost breakdown per
scenario.

Run:  python3 demos/01_plan_one_day.py
"""

import numpy as np

from hubbid import (
    BessSpec,
    ClusterSpec,
    DataCenterSpec,
    EconomicsSpec,
    ExogenousScenario,
    HubSpec,
    PpaContract,
    Scenario,
    ScenarioSet,
    SolveOptions,
    TimeGrid,
    WorkloadScenario,
    plan_day,
)

HOURS = np.arange(24.0)

spec = HubSpec(
    datacenter=DataCenterSpec(
        clusters=(
            ClusterSpec(
                id="cpu",
                capacity={"CPU": 400.0},
                rho_intercept=6.0,
                rho_coeff={"CPU": 0.12},
                mem_ratio={},
            ),
        ),
        pue=1.2,
    ),
    ppa=PpaContract(p_gcp_rated=120.0, p_gcp_min=10.0, t_daily_lim=4.0, t_weekly_lim=10.0),
    economics=EconomicsSpec(carbon_price=0.08, heat_price=0.03, cvar_alpha=0.75, cvar_beta=0.3),
    bess=BessSpec(
        e_min=10.0,
        e_max=90.0,
        e_rated=100.0,
        p_rated=60.0,
        eta_oneway=0.93,
        e_init=50.0,
        rated_cycles=6000.0,
        investment_cost=40000.0,
        lca_emissions=9000.0,
    ),
)

# a duck-curve spot forecast and two shifted variants around it
base_spot = 0.06 + 0.05 * np.exp(-0.5 * ((HOURS - 19) / 2.5) ** 2) - 0.03 * np.exp(
    -0.5 * ((HOURS - 13) / 3.0) ** 2
)
workload = WorkloadScenario(
    inelastic={("cpu", "CPU"): 120.0 + 140.0 * np.exp(-0.5 * ((HOURS - 12) / 4.0) ** 2)},
    flexible={("cpu", "CPU"): 600.0},  # resource-hours, free to place within the day
)


def scenario(scale, prob):
    spot = scale * base_spot
    exo = ExogenousScenario(
        spot=spot,
        price_short=1.3 * spot,
        price_long=0.6 * spot,
        carbon_intensity=np.full(24, 0.25),
        renewable_share=np.full(24, 0.5),
        ghi=np.zeros(24),
        heat_demand=np.zeros(24),
    )
    return Scenario(exo, workload, prob)


sset = ScenarioSet(
    (scenario(0.8, 0.3), scenario(1.0, 0.5), scenario(1.35, 0.2)), TimeGrid(1.0, 24)
)

bid = plan_day(spec, sset, options=SolveOptions(mip_gap=1e-6))

print(f"status {bid.status}, expected cost {bid.expected_cost:.2f} EUR, "
      f"CVaR(75%) {bid.cvar:.2f} EUR")
print("\nhour  bid [kW]   VCC cpu/CPU [units]")
for t in range(24):
    print(f"{t:4d}  {bid.day_ahead[t]:8.1f}   {bid.vcc[('cpu', 'CPU')][t]:8.1f}")

print("\ncost breakdown, scenario by scenario (EUR):")
for w, cats in enumerate(bid.cost_breakdown):
    parts = ", ".join(f"{k} {v:+.2f}" for k, v in cats.items() if abs(v) > 0.005)
    print(f"  scenario {w} (p={bid.probabilities[w]:.2f}): {parts}")
