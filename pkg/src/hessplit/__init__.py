"""Load-profile analysis and dispatch simulation for hybrid storage.

The package answers two questions about an electrical load profile:

1. Is this site a good fit for a hybrid store pairing a supercapacitor
   (fast, tiny) with a vanadium redox flow battery (slow, deep)? —
   resolution gate, per-unit metrics, transient histograms, rule-based
   classification.
2. What would a simple threshold split actually do? — step-by-step
   dispatch simulation with state-of-charge, ramp, and recharge rules,
   threshold sweeps, and outage-coverage checks.
"""

__version__ = "0.1.0"

from .classify import ClassificationReport, Relevance, RuleThresholds, classify
from .ems import (
    DeviceParams,
    DispatchResult,
    EmsConfig,
    EngageMode,
    FlagSeries,
    Limiting,
    UpsScenario,
    UtilizationStats,
    compute_flags,
    dispatch,
    make_ups_scenario,
    threshold_sweep,
    write_dispatch_csv,
    write_sweep_csv,
)
from .errors import HessplitError
from .metrics import (
    NormalizedProfile,
    PeakStats,
    ProfileMetrics,
    base_load_estimate,
    compute_metrics,
    load_factor,
    normalize,
    peak_stats,
)
from .profiles import (
    CatalogEntry,
    Category,
    LoadProfile,
    ResolutionVerdict,
    load_catalog,
    parse_profile,
    parse_profile_file,
    read_catalog,
    resample,
    validate_resolution,
    write_profile_csv,
)
from .report import AnalysisReport, analyze_profile, read_report_json, write_report_json
from .synth import (
    EvParkSpec,
    MachineSpec,
    MunicipalSpec,
    gen_ev_park,
    gen_machine,
    gen_municipal,
    generate,
)
from .transient import (
    DerivativeSeries,
    Histogram,
    SymmetryReport,
    derivative,
    histogram,
    symmetry_report,
    write_histogram_csv,
)

__all__ = [
    "__version__",
    "AnalysisReport",
    "CatalogEntry",
    "Category",
    "ClassificationReport",
    "DerivativeSeries",
    "DeviceParams",
    "DispatchResult",
    "EmsConfig",
    "EngageMode",
    "EvParkSpec",
    "FlagSeries",
    "HessplitError",
    "Histogram",
    "Limiting",
    "LoadProfile",
    "MachineSpec",
    "MunicipalSpec",
    "NormalizedProfile",
    "PeakStats",
    "ProfileMetrics",
    "Relevance",
    "ResolutionVerdict",
    "RuleThresholds",
    "SymmetryReport",
    "UpsScenario",
    "UtilizationStats",
    "analyze_profile",
    "base_load_estimate",
    "classify",
    "compute_flags",
    "compute_metrics",
    "derivative",
    "dispatch",
    "gen_ev_park",
    "gen_machine",
    "gen_municipal",
    "generate",
    "histogram",
    "load_catalog",
    "load_factor",
    "make_ups_scenario",
    "normalize",
    "parse_profile",
    "parse_profile_file",
    "peak_stats",
    "read_catalog",
    "read_report_json",
    "resample",
    "symmetry_report",
    "threshold_sweep",
    "validate_resolution",
    "write_dispatch_csv",
    "write_histogram_csv",
    "write_profile_csv",
    "write_report_json",
    "write_sweep_csv",
]
