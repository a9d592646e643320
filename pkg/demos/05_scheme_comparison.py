"""Scoring supply schemes against realized days.

Plans each bundled day three ways and replays every plan against what the
day actually brought: 'custom' bids hourly on the day-ahead market, 'tou'
buys everything under a time-of-use tariff, and 'custom_noflex' bids
hourly but with the flexible jobs frozen into a uniform schedule, which
isolates what temporal flexibility itself is worth.

Run:  python3 demos/05_scheme_comparison.py
"""

import pathlib

from hubbid import (
    compare_schemes,
    generate_scenario_set,
    load_caps,
    load_hub,
    load_manifest,
    load_realized_day,
    load_scenario_inputs,
)

ROOT = pathlib.Path(__file__).resolve().parents[1]
man = load_manifest(str(ROOT / "fixtures" / "toyhub" / "manifest.json"))
spec, grid = load_hub(man.resolve(man.hub))
caps = load_caps(man, grid)

days = list(man.days.days)
ssets, realized = [], []
for day in days:
    inputs = load_scenario_inputs(man, spec, grid, day)
    ssets.append(generate_scenario_set(inputs, spec.datacenter, 8, 150, k=4, seed=man.day_seed(day)))
    realized.append(load_realized_day(man.day_file("realized.json", day)))
print(f"planning {len(days)} days ({', '.join(days)}) with 4 scenarios each\n")

schemes = ("custom", "tou", "custom_noflex")
cmp = compare_schemes(spec, ssets, realized, schemes, caps, man.solver, jobs=2)

print(f"{'scheme':<15} {'mean cost':>10} {'mean CO2':>9} {'mean imbalance':>15}")
for scheme in schemes:
    s = cmp.reports[scheme].summary
    print(f"{scheme:<15} {s['ex_post_cost']['mean']:>10.2f} "
          f"{s['ex_post_emissions']['mean']:>9.2f} {s['imbalance_energy']['mean']:>15.2f}")
print("(cost EUR/day, emissions kg/day, imbalance kWh/day)\n")

for scheme, row in cmp.deltas.items():
    cost = row["mean_ex_post_cost_pct"]
    emis = row["mean_ex_post_emissions_pct"]
    print(f"{scheme} vs custom: cost {cost:+.1f}%, emissions {emis:+.1f}%")

print("\nper-day realized cost (EUR):")
for scheme in schemes:
    by_day = ", ".join(f"{o.date} {o.ex_post_cost:.2f}" for o in cmp.reports[scheme].outcomes)
    print(f"  {scheme:<15} {by_day}")
