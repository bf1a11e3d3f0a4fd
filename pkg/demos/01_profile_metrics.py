"""
Load profile ingest and baseline metrics
========================================

Parse a small CSV, normalize it to per-unit, and print the numbers the
classifier later feeds on.
"""

import io

import numpy as np

from hessplit import compute_metrics, normalize, parse_profile, validate_resolution

# a toy factory day: 30 s grid, quiet baseline with two short peaks
rows = ["timestamp,power_kw"]
power = np.full(240, 42.0)
power[40:55] = 150.0
power[180:184] = 200.0
for i, p in enumerate(power):
    rows.append(f"{30 * i},{p}")
profile = parse_profile(io.StringIO("\n".join(rows)), site_id="toy-factory")

verdict = validate_resolution(profile)
print(f"site {profile.site_id}: {profile.n_samples} samples at dt={profile.dt}s")
print(f"  resolution verdict: {verdict.reason}")

norm = normalize(profile)
print(f"  peak power     {norm.base_power_kw:8.1f} kW  (pu reference)")

m = compute_metrics(profile)
print(f"  energy         {m.energy_kwh:8.2f} kWh")
print(f"  load factor    {m.load_factor:8.3f}")
print(f"  base load      {m.base_load_pu:8.3f} pu")
print(f"  peaks above base: {m.peak_count} "
      f"(mean {m.mean_peak_duration_s:.0f}s, longest {m.max_peak_duration_s:.0f}s)")
print(f"  time above base  {m.time_above_base_fraction:.3f}")
print(f"  energy above base {m.energy_above_base_pu_h:.4f} pu·h")
