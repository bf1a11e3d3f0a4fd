"""Per-unit normalization and time-domain load metrics.

Everything downstream works on per-unit (pu) series: samples divided by the
profile maximum, so the peak is exactly 1.0 and profiles of different sites
become comparable. The base load is estimated as the most frequent power
level below the peak region, and peak statistics count excursions above it.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import AllZeroProfileError, DegenerateBaseLoadWarning, InvalidConfigError
from .profiles import LoadProfile

#: Per-unit level above which samples count as "peak region" rather than base.
PEAK_BAND_PU = 0.8
#: Default bin count for the base-load histogram.
BASE_LOAD_BINS = 100


@dataclass(frozen=True, eq=False)
class NormalizedProfile:
    """A load profile rescaled to its own maximum.

    ``pu`` is ``samples / max(samples)``; by construction ``max(pu) == 1.0``
    exactly, because IEEE division of the maximum by itself is exact.
    ``base_power_kw`` is that maximum, kept to convert back to kilowatts.
    """

    site_id: str
    dt: float
    base_power_kw: float
    pu: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pu, dtype=np.float64)
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "pu", arr)

    @property
    def n_samples(self) -> int:
        return int(self.pu.size)


def normalize(profile: LoadProfile) -> NormalizedProfile:
    """Divide a profile by its maximum, yielding a per-unit series.

    Raises
    ------
    AllZeroProfileError
        If the profile maximum is zero (nothing to scale by).
    """
    p_max = profile.max_kw
    if p_max == 0.0:
        raise AllZeroProfileError(
            f"profile {profile.site_id!r} is identically zero; per-unit form undefined"
        )
    return NormalizedProfile(
        site_id=profile.site_id, dt=profile.dt, base_power_kw=p_max,
        pu=profile.samples / p_max,
    )


def load_factor(norm: NormalizedProfile) -> float:
    """Mean of the per-unit series: 1.0 means flat, small means peaky."""
    return float(norm.pu.mean())


def base_load_estimate(
    norm: NormalizedProfile,
    *,
    bins: int = BASE_LOAD_BINS,
    peak_band: float = PEAK_BAND_PU,
) -> float:
    """Most frequent per-unit level below the peak band.

    Histograms the pu series over [0, 1] and returns the center of the
    fullest bin among those whose center lies below ``peak_band``. Ties go
    to the lower level. If no sample mass sits below the band at all, the
    estimate degenerates to 1.0 and a :class:`DegenerateBaseLoadWarning`
    is emitted.
    """
    if bins < 10:
        raise InvalidConfigError(f"base-load histogram needs >= 10 bins, got {bins}")
    if norm.n_samples < bins:
        raise InvalidConfigError(
            f"base-load estimate needs at least one sample per bin "
            f"({norm.n_samples} samples < {bins} bins)"
        )
    if not 0.0 < peak_band <= 1.0:
        raise InvalidConfigError(f"peak_band must lie in (0, 1], got {peak_band}")
    counts, edges = np.histogram(norm.pu, bins=bins, range=(0.0, 1.0))
    centers = (edges[:-1] + edges[1:]) / 2.0
    below = centers < peak_band
    if not np.any(counts[below] > 0):
        warnings.warn(
            f"profile {norm.site_id!r} has no samples below {peak_band} pu; "
            "base-load estimate degenerates to the peak",
            DegenerateBaseLoadWarning,
        )
        return 1.0
    masked = np.where(below, counts, -1)
    return float(centers[int(np.argmax(masked))])


@dataclass(frozen=True)
class PeakStats:
    """Excursions of a pu series strictly above a level."""

    level: float
    peak_count: int
    mean_duration_s: float
    max_duration_s: float
    time_above_fraction: float
    energy_above_pu_h: float


def peak_stats(norm: NormalizedProfile, level: float) -> PeakStats:
    """Count and size contiguous runs with ``pu > level`` (strict).

    Durations are run lengths times the sample interval;
    ``energy_above_pu_h`` integrates the excess over the level,
    ``sum(max(pu - level, 0)) * dt / 3600``, in per-unit hours. With no
    runs, durations are 0 and the count is 0.
    """
    if not 0.0 <= level < 1.0:
        raise InvalidConfigError(f"peak level must be in [0, 1), got {level}")
    above = norm.pu > level
    # run boundaries: +1 where a run starts, -1 one past where it ends
    padded = np.diff(np.concatenate(([0], above.astype(np.int8), [0])))
    starts = np.flatnonzero(padded == 1)
    ends = np.flatnonzero(padded == -1)
    lengths = ends - starts
    n = int(lengths.size)
    return PeakStats(
        level=level,
        peak_count=n,
        mean_duration_s=float(lengths.mean() * norm.dt) if n else 0.0,
        max_duration_s=float(lengths.max() * norm.dt) if n else 0.0,
        time_above_fraction=float(above.mean()),
        energy_above_pu_h=float(np.maximum(norm.pu - level, 0.0).sum() * norm.dt / 3600.0),
    )


@dataclass(frozen=True)
class ProfileMetrics:
    """Summary numbers for one profile, in per-unit terms plus absolute energy."""

    site_id: str
    dt: float
    base_power_kw: float
    energy_kwh: float
    load_factor: float
    base_load_pu: float
    peak_count: int
    mean_peak_duration_s: float
    max_peak_duration_s: float
    time_above_base_fraction: float
    energy_above_base_pu_h: float


def compute_metrics(
    profile: LoadProfile,
    *,
    bins: int = BASE_LOAD_BINS,
    peak_band: float = PEAK_BAND_PU,
) -> ProfileMetrics:
    """Normalize a profile and derive its summary metrics.

    Peak statistics are taken at the estimated base-load level, so
    ``peak_count`` answers "how often does the site rise above its
    typical draw", not "above an arbitrary threshold". When the base
    estimate degenerates to 1.0 (nothing below the peak band) the peak
    statistics fall back to level 0 so they stay defined.
    """
    norm = normalize(profile)
    base = base_load_estimate(norm, bins=bins, peak_band=peak_band)
    peaks = peak_stats(norm, base) if base < 1.0 else peak_stats(norm, 0.0)
    return ProfileMetrics(
        site_id=profile.site_id,
        dt=profile.dt,
        base_power_kw=norm.base_power_kw,
        energy_kwh=float(profile.samples.sum() * profile.dt / 3600.0),
        load_factor=load_factor(norm),
        base_load_pu=base,
        peak_count=peaks.peak_count,
        mean_peak_duration_s=peaks.mean_duration_s,
        max_peak_duration_s=peaks.max_duration_s,
        time_above_base_fraction=peaks.time_above_fraction,
        energy_above_base_pu_h=peaks.energy_above_pu_h,
    )
