"""Rule-based suitability verdicts for hybrid-storage deployment.

The classifier folds the time-domain metrics and the transient summaries
into two relevance grades — one per storage component — plus an overall
verdict. Rules are deliberately shallow and fully explained: every grade
that differs from the Low default carries at least one human-readable
rationale string, and the verdict rule always speaks.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Optional

from .errors import InconsistentInputsError
from .metrics import ProfileMetrics
from .profiles import Category
from .transient import Histogram, SymmetryReport


class Relevance(IntEnum):
    """How much a storage component has to contribute; ordered."""

    LOW = 0
    MEDIUM = 1
    HIGH = 2

    @property
    def label(self) -> str:
        return self.name.title()


@dataclass(frozen=True)
class RuleThresholds:
    """Tunable constants of the rule set.

    Defaults were calibrated once against the three bundled synthetic
    generators and then frozen; change them only with a reason.
    """

    edge_band_pu: float = 0.1          # width of the "near 0"/"near max" bands
    min_edge_mass: float = 0.15        # mass each band needs for bimodality
    min_fast_transient_mass: float = 5e-4   # derivative tail mass for "busy"
    min_symmetry_index: float = 0.8    # balanced up/down switching
    max_quiet_tail_mass: float = 0.05  # combined tail mass still "quiet"
    tail_dominance_ratio: float = 2.0  # one-sided if max tail > ratio * min


@dataclass(frozen=True)
class ClassificationReport:
    """Outcome of the rule set for one profile."""

    category: Category
    hess_compliant: bool
    sc_relevance: Relevance
    vrfb_relevance: Relevance
    rationale: list[str]


def _edge_masses(load_hist: Histogram, band: float) -> tuple[float, float]:
    """Fractions of load mass within ``band`` of zero and of the maximum."""
    centers = load_hist.centers
    f = load_hist.fractions
    top = load_hist.edges[-1]
    return float(f[centers < band].sum()), float(f[centers > top - band].sum())


def classify(
    metrics: ProfileMetrics,
    sym: SymmetryReport,
    load_hist: Histogram,
    hint: Optional[Category] = None,
    rules: RuleThresholds = RuleThresholds(),
) -> ClassificationReport:
    """Grade a profile's fit for the supercapacitor and the flow battery.

    Rules, in order:

    * bimodal load (mass piled near zero *and* near the maximum) together
      with non-negligible fast-transient mass grades the supercapacitor
      High — the on/off switching pattern;
    * otherwise a symmetric derivative with almost no tail mass grades it
      Low — steady operation with only isolated jumps;
    * a tail dominated by one sign (either one) raises the supercapacitor
      to at least Medium — the irregular-arrival pattern;
    * any energy above the base level makes the battery at least Medium;
    * the profile is compliant when either component reaches Medium.

    The category is taken from the caller's hint (that is the only way the
    virtual-inertia label can appear) and defaults to Unknown.

    Raises
    ------
    InconsistentInputsError
        If the histogram and symmetry report disagree about the series
        length (the derivative has exactly one value fewer than the load).
    """
    if load_hist.total != sym.total + 1:
        raise InconsistentInputsError(
            f"load histogram covers {load_hist.total} samples but the symmetry report "
            f"covers {sym.total} derivative steps; expected exactly one fewer"
        )

    rationale: list[str] = []
    sc = Relevance.LOW
    vrfb = Relevance.LOW

    lo_mass, hi_mass = _edge_masses(load_hist, rules.edge_band_pu)
    fast_mass = sym.positive_tail_mass + sym.negative_tail_mass
    bimodal = lo_mass > rules.min_edge_mass and hi_mass > rules.min_edge_mass

    if bimodal and fast_mass > rules.min_fast_transient_mass:
        sc = Relevance.HIGH
        rationale.append(
            f"load piles up near zero ({lo_mass:.0%}) and near the maximum ({hi_mass:.0%}) "
            f"with {fast_mass:.2%} of steps in the fast-transient tails: "
            "on/off switching, prime supercapacitor duty"
        )
    elif sym.symmetry_index >= rules.min_symmetry_index and fast_mass < rules.max_quiet_tail_mass:
        sc = Relevance.LOW
        rationale.append(
            f"transients balance out (symmetry index {sym.symmetry_index:.3f}) and only "
            f"{fast_mass:.2%} exceed ±{sym.tail_level:g} of the largest swing: "
            "little work for a supercapacitor"
        )

    big, small = max(sym.positive_tail_mass, sym.negative_tail_mass), min(
        sym.positive_tail_mass, sym.negative_tail_mass
    )
    if big > rules.tail_dominance_ratio * small and big > 0.0:
        side = "upward" if sym.positive_tail_mass >= sym.negative_tail_mass else "downward"
        if sc < Relevance.MEDIUM:
            sc = Relevance.MEDIUM
        rationale.append(
            f"{side} transients dominate ({big:.3%} vs {small:.3%}): "
            "irregular arrivals that fast storage can absorb"
        )

    if metrics.energy_above_base_pu_h > 0.0:
        vrfb = Relevance.MEDIUM
        rationale.append(
            f"{metrics.energy_above_base_pu_h:.3g} pu·h of demand above the "
            f"{metrics.base_load_pu:.2f} pu base level: battery-scale shaving available"
        )

    compliant = sc >= Relevance.MEDIUM or vrfb >= Relevance.MEDIUM
    if compliant:
        rationale.append(
            f"suitable for hybrid storage: supercapacitor {sc.label}, "
            f"flow battery {vrfb.label} (at least one Medium)"
        )
    else:
        rationale.append(
            "not suitable for hybrid storage: both components grade Low"
        )

    return ClassificationReport(
        category=hint if hint is not None else Category.UNKNOWN,
        hess_compliant=compliant,
        sc_relevance=sc,
        vrfb_relevance=vrfb,
        rationale=rationale,
    )
