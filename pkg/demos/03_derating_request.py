"""Validating grid-operator de-rating requests against the connection contract.

The grid operator may ask the hub to cap its connection below the rated
power for a few hours. The contract bounds how deep and how long: caps must
stay between the guaranteed minimum and the rated power, and the foregone
transfer energy is budgeted per day and per rolling week. This walks one
acceptable request and three ways a request can fail.

Run:  python3 demos/03_derating_request.py
"""

import numpy as np

from hubbid import DeratingProfile, PpaContract, TimeGrid, validate_derating

grid = TimeGrid(step_hours=1.0, steps_per_day=24)
contract = PpaContract(p_gcp_rated=300.0, p_gcp_min=25.0, t_daily_lim=4.0, t_weekly_lim=8.0)

daily_budget = (contract.p_gcp_rated - contract.p_gcp_min) * contract.t_daily_lim
weekly_budget = (contract.p_gcp_rated - contract.p_gcp_min) * contract.t_weekly_lim
print(f"contract: rated {contract.p_gcp_rated:.0f} kW, minimum {contract.p_gcp_min:.0f} kW")
print(f"budgets:  {daily_budget:.0f} kWh per day, {weekly_budget:.0f} kWh per week\n")


def show(label, verdict):
    tag = "PASS" if verdict.passed else "FAIL"
    print(f"{label}: {tag}")
    print(f"  min capacity ok {verdict.min_capacity_ok}, within rated {verdict.within_rated_ok}, "
          f"daily ok {verdict.daily_ok}, weekly ok {verdict.weekly_ok}")
    days = ", ".join(f"{e:.0f}" for e in verdict.daily_energy_kwh)
    print(f"  de-rating energy per day: [{days}] kWh (budget {verdict.daily_budget_kwh:.0f})")
    if verdict.violating_steps:
        print(f"  violating steps: {verdict.violating_steps}")
    print()


# a typical evening request: cap the connection from 17:00 to 21:00
caps = np.full(24, contract.p_gcp_rated)
caps[17:21] = (75.0, 25.0, 25.0, 50.0)
show("evening curtailment, within budget", validate_derating(DeratingProfile(caps), contract, grid))

# same shape but one step drops below the guaranteed minimum
low = caps.copy()
low[19] = 20.0
show("one step below the minimum", validate_derating(DeratingProfile(low), contract, grid))

# shallow but long: each step is fine, the daily energy budget is not
shallow = np.full(24, contract.p_gcp_rated)
shallow[:12] = 200.0
show("half a day at 200 kW", validate_derating(DeratingProfile(shallow), contract, grid))

# a week of modest morning curtailments; days pass, the week does not
week = np.full(7 * 24, contract.p_gcp_rated)
for d in range(3):
    week[d * 24 : d * 24 + 4] = 50.0
show("three mornings at 50 kW in one week", validate_derating(DeratingProfile(week), contract, grid))
