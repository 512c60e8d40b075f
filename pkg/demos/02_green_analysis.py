"""
Energy, cost, carbon and battery life of a source device
=========================================================

Per-transfer energy is the battery energy drained while the source's
radio is busy. Annual figures assume one 80 MB file per day.
"""

# %%
from ds2d import default_scenario, sweep_rate_levels

scn = default_scenario()
res = sweep_rate_levels(scn, schemes=["d2d", "multihoming", "optimal", "random"])

# %%
# Level 1 (213.3 kbps for D1) in detail.
for s in ("d2d", "multihoming", "optimal", "random"):
    g = res.row(1, s).green
    print(f"{s:12s} {g.energy_wh:6.3f} Wh/transfer  {g.annual_kwh:6.3f} kWh/yr  "
          f"${g.annual_cost_usd:5.3f}/yr  {g.annual_co2_lb:5.3f} lb CO2/yr  "
          f"battery {g.battery_life_h:5.2f} h  completes={g.completes_on_full_charge}")

# %%
# Multi-homing sends the file at the same speed as the optimal Ds2D split,
# but one device powers both radios, so it pays twice the per-device energy.
mh, opt = res.row(1, "multihoming").green, res.row(1, "optimal").green
print("multi-homing / Ds2D per-device energy:", mh.energy_wh / opt.energy_wh)

# %%
# Energy saved relative to D2D at level 2.
d2d = res.row(2, "d2d").green.energy_wh
for s in ("optimal", "random"):
    print(f"{s}: {1 - res.row(2, s).green.energy_wh / d2d:.1%} less energy than D2D")

# %%
# Battery life depends on how often the transfer is repeated. Doubling the
# duty halves the life.
from dataclasses import replace

busy = replace(scn, battery=replace(scn.battery, duty_per_hour=4.0))
r2 = sweep_rate_levels(busy, levels=[1], schemes=["optimal"])
print("battery life at 2/h:", res.row(1, "optimal").green.battery_life_h,
      " at 4/h:", r2.row(1, "optimal").green.battery_life_h)
