"""From forecasts and residual history to a weighted scenario set.

Walks the three pipeline stages on the bundled toy hub data: bootstrap a
pool per stochastic parameter, draw independent combinations, reduce them
to a handful of weighted representatives. The same path runs behind
``hubbid scenarios``.

Run:  python3 demos/02_scenario_pipeline.py
"""

import pathlib

import numpy as np

from hubbid import load_manifest, load_scenario_inputs
from hubbid.domain.configio import load_hub
from hubbid.scenarios import generate_scenario_set
from hubbid.scenarios.pipeline import build_parameter_pools, combine_scenarios

ROOT = pathlib.Path(__file__).resolve().parents[1]
man = load_manifest(str(ROOT / "fixtures" / "toyhub" / "manifest.json"))
spec, grid = load_hub(man.resolve(man.hub))
inputs = load_scenario_inputs(man, spec, grid)

pools = build_parameter_pools(inputs, spec.datacenter, n_per_param=12, seed=man.seed)
print(f"bootstrap pools: {len(pools)} stochastic parameters, 12 draws each")
for name in pools:
    print(f"  {name}")

combos = combine_scenarios(pools, n_combos=400, seed=man.seed + 1)
print(f"\ncombination stage: {combos.vectors.shape[0]} joint scenarios, "
      f"{combos.vectors.shape[1]} values per scenario vector")

sset = generate_scenario_set(inputs, spec.datacenter, 12, 400, k=5, seed=man.seed)
print(f"\nreduced to {len(sset)} representatives (probability sum "
      f"{float(np.sum(sset.probabilities)):.6f}):")
for i, s in enumerate(sset.scenarios):
    spot = np.asarray(s.exogenous.spot)
    print(f"  #{i}: p={s.probability:.3f}  mean spot {spot.mean():.3f} EUR/kWh  "
          f"peak {spot.max():.3f}")

# imbalance prices never come from the pools: they are spot multiples from
# the calibrated factors, so the short price stays above spot
s0 = sset.scenarios[0].exogenous
ratio_short = float(np.mean(np.asarray(s0.price_short) / np.asarray(s0.spot)))
ratio_long = float(np.mean(np.asarray(s0.price_long) / np.asarray(s0.spot)))
print(f"\ncalibrated imbalance factors: short {ratio_short:.3f}x spot, "
      f"long {ratio_long:.3f}x spot")
