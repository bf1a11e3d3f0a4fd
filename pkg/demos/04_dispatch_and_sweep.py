"""
Threshold dispatch, sweeps, and outage sizing
=============================================

Split an EV-park day between supercapacitor and flow battery, watch how
the split reacts to the threshold, then check whether the same devices
could carry an outage.
"""

from hessplit import (
    DeviceParams,
    EmsConfig,
    EngageMode,
    EvParkSpec,
    dispatch,
    gen_ev_park,
    make_ups_scenario,
    normalize,
    threshold_sweep,
)

profile, _ = gen_ev_park(EvParkSpec())
norm = normalize(profile)

res = dispatch(norm)  # defaults: threshold 0.8, derivative engage on
s = res.stats
print(f"dispatch of {profile.site_id} (recharge below {res.recharge_threshold:.3f} pu)")
print(f"  SC engaged          {s.sc_engaged_fraction:.2%} of steps")
print(f"  discharge share     SC {s.sc_energy_share:.2%} / VRFB {s.vrfb_energy_share:.2%}")
print(f"  grid peak           {s.grid_peak_kw:.2f} kW "
      f"(cut {s.grid_peak_reduction_fraction:.1%} off the raw peak)")
print()

# sweep the threshold: a higher bar means the SC sees fewer steps
print("threshold sweep (threshold-only engagement):")
cfg = EmsConfig(sc_engage_mode=EngageMode.THRESHOLD_ONLY)
for thr, stats in threshold_sweep(norm, [0.5, 0.6, 0.7, 0.8, 0.9], cfg):
    print(f"  thr {thr:.1f}:  engaged {stats.sc_engaged_fraction:7.2%}, "
          f"grid peak {stats.grid_peak_kw:6.2f} kW")
print()

# outage coverage with the default 5 kW / 10 kWh battery + supercap
scenario = make_ups_scenario(profile, outage_start_s=8 * 3600, outage_duration_s=3600,
                             dev=DeviceParams())
print(f"one-hour outage at 08:00: feasible={scenario.feasible} "
      f"(limit: {scenario.limiting.value})")
print(f"  window peak {scenario.window_peak_kw:.2f} kW, "
      f"energy {scenario.window_energy_kwh:.2f} kWh "
      f"of {scenario.energy_available_kwh:.2f} kWh stored")
