"""
Classifying three site types
============================

Run the full analysis pipeline on the bundled synthetic generators and
compare verdicts: which sites justify a supercapacitor next to the flow
battery, and why.
"""

from hessplit import (
    EvParkSpec,
    MachineSpec,
    MunicipalSpec,
    analyze_profile,
    gen_ev_park,
    gen_machine,
    gen_municipal,
)

sites = [
    gen_municipal(MunicipalSpec(days=2))[0],
    gen_machine(MachineSpec())[0],
    gen_ev_park(EvParkSpec())[0],
]

for profile in sites:
    rep = analyze_profile(profile)
    c = rep.classification
    print(f"{profile.site_id}")
    print(f"  base load        {rep.metrics.base_load_pu:.3f} pu, "
          f"load factor {rep.metrics.load_factor:.3f}")
    print(f"  symmetry index   {rep.symmetry.symmetry_index:.4f}")
    print(f"  HESS compliant   {c.hess_compliant}")
    print(f"  supercap         {c.sc_relevance.label}")
    print(f"  flow battery     {c.vrfb_relevance.label}")
    for line in c.rationale:
        print(f"    - {line}")
    print()
