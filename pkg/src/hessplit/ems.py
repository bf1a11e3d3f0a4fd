"""Threshold-based energy management: flags, power split, sweeps, outages.

The rule is deliberately simple. Load above ``sc_threshold`` of the profile
peak is supercapacitor (SC) territory; the flow battery (VRFB) serves the
band between the recharge threshold and the SC band; the grid is the slack
that absorbs whatever is left — including negative residuals when the
battery has to ramp down slower than the load drops.

All dispatch arithmetic is written out step by step (no vectorization)
because the state of charge is a genuine recurrence. The exact floating
point expressions used per step are documented on :func:`dispatch` and are
part of the behavioral contract.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import IO, Optional, Sequence, Union

import numpy as np

from .errors import (
    IncompatibleResolutionError,
    InvalidConfigError,
    ResolutionTooCoarseError,
    WindowOutOfRangeError,
)
from .metrics import NormalizedProfile, base_load_estimate
from .profiles import SC_MAX_DT_S, UPS_MAX_DT_S, LoadProfile
from .transient import derivative


class EngageMode(Enum):
    """When the supercapacitor participates in a step."""

    THRESHOLD_ONLY = "ThresholdOnly"
    THRESHOLD_OR_DERIVATIVE = "ThresholdOrDerivative"


class Limiting(Enum):
    """Which constraint breaks an outage scenario, if any."""

    NONE = "None"
    POWER = "Power"
    ENERGY = "Energy"


@dataclass(frozen=True)
class EmsConfig:
    """Thresholds steering the power split.

    ``recharge_threshold`` may be ``None``, in which case dispatch derives it
    from the profile's base-load estimate (and falls back to 0, disabling
    recharge, if that estimate is not below ``sc_threshold``).
    """

    sc_threshold: float = 0.8
    derivative_threshold: float = 0.5
    recharge_threshold: Optional[float] = None
    sc_engage_mode: EngageMode = EngageMode.THRESHOLD_OR_DERIVATIVE

    def __post_init__(self):
        if not 0.0 < self.sc_threshold < 1.0:
            raise InvalidConfigError(f"sc_threshold must be in (0, 1), got {self.sc_threshold}")
        if not 0.0 < self.derivative_threshold <= 1.0:
            raise InvalidConfigError(
                f"derivative_threshold must be in (0, 1], got {self.derivative_threshold}"
            )
        if self.recharge_threshold is not None and not (
            0.0 <= self.recharge_threshold < self.sc_threshold
        ):
            raise InvalidConfigError(
                f"recharge_threshold must satisfy 0 <= r < sc_threshold, "
                f"got {self.recharge_threshold} vs {self.sc_threshold}"
            )


@dataclass(frozen=True)
class DeviceParams:
    """Ratings and state bounds of the two storage devices.

    Defaults mirror a small demonstrator: a 5 kW / 10 kWh flow battery next
    to a 5 kW / 0.05 kWh supercapacitor. The battery ramp default reaches
    full power in two seconds; the supercapacitor is treated as ramp-free.
    Recharge powers default to the device power rating. Efficiencies are
    hooks and default to lossless.
    """

    vrfb_power_kw: float = 5.0
    vrfb_energy_kwh: float = 10.0
    vrfb_ramp_kw_per_s: float = 2.5
    sc_power_kw: float = 5.0
    sc_energy_kwh: float = 0.05
    sc_initial_soc_fraction: float = 1.0
    vrfb_initial_soc_fraction: float = 1.0
    sc_recharge_power_kw: Optional[float] = None
    vrfb_recharge_power_kw: Optional[float] = None
    sc_efficiency: float = 1.0
    vrfb_efficiency: float = 1.0

    def __post_init__(self):
        for name in ("vrfb_power_kw", "vrfb_energy_kwh", "vrfb_ramp_kw_per_s",
                     "sc_power_kw", "sc_energy_kwh"):
            v = getattr(self, name)
            if not v > 0.0:
                raise InvalidConfigError(f"{name} must be > 0, got {v}")
        for name in ("sc_initial_soc_fraction", "vrfb_initial_soc_fraction"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise InvalidConfigError(f"{name} must be in [0, 1], got {v}")
        for name in ("sc_recharge_power_kw", "vrfb_recharge_power_kw"):
            v = getattr(self, name)
            if v is not None and not v >= 0.0:
                raise InvalidConfigError(f"{name} must be >= 0, got {v}")
        for name in ("sc_efficiency", "vrfb_efficiency"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise InvalidConfigError(f"{name} must be in (0, 1], got {v}")

    @property
    def sc_recharge_kw(self) -> float:
        return self.sc_power_kw if self.sc_recharge_power_kw is None else self.sc_recharge_power_kw

    @property
    def vrfb_recharge_kw(self) -> float:
        return (
            self.vrfb_power_kw
            if self.vrfb_recharge_power_kw is None
            else self.vrfb_recharge_power_kw
        )


@dataclass(frozen=True, eq=False)
class FlagSeries:
    """Per-step component flags; exactly one of the two is set at each step."""

    flag_sc: np.ndarray
    flag_vrfb: np.ndarray

    def __post_init__(self):
        for name in ("flag_sc", "flag_vrfb"):
            arr = np.asarray(getattr(self, name), dtype=bool).copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)


def compute_flags(norm: NormalizedProfile, cfg: EmsConfig) -> FlagSeries:
    """Evaluate the component flags: SC above the threshold, VRFB at or below.

    The comparison is strict (``pu > sc_threshold``), so a sample exactly on
    the threshold belongs to the battery. The two flags partition every step.
    """
    sc = norm.pu > cfg.sc_threshold
    return FlagSeries(flag_sc=sc, flag_vrfb=~sc)


@dataclass(frozen=True)
class UtilizationStats:
    """Summary of one dispatch run."""

    sc_engaged_fraction: float
    sc_energy_share: float
    vrfb_energy_share: float
    grid_peak_kw: float
    grid_peak_reduction_fraction: float


@dataclass(frozen=True, eq=False)
class DispatchResult:
    """Per-step traces of a dispatch run plus its summary.

    Device powers are positive when discharging and negative when
    recharging; ``p_grid_kw`` may go negative when the battery must ramp
    down slower than the load drops. SoC traces hold the end-of-step state.
    """

    dt: float
    base_power_kw: float
    p_load_kw: np.ndarray
    p_grid_kw: np.ndarray
    p_sc_kw: np.ndarray
    p_vrfb_kw: np.ndarray
    soc_sc_kwh: np.ndarray
    soc_vrfb_kwh: np.ndarray
    flag_sc: np.ndarray
    engaged_sc: np.ndarray
    recharge_threshold: float
    stats: UtilizationStats

    def __post_init__(self):
        for name in ("p_load_kw", "p_grid_kw", "p_sc_kw", "p_vrfb_kw",
                     "soc_sc_kwh", "soc_vrfb_kwh"):
            arr = np.asarray(getattr(self, name), dtype=np.float64).copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        for name in ("flag_sc", "engaged_sc"):
            arr = np.asarray(getattr(self, name), dtype=bool).copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def n_steps(self) -> int:
        return int(self.p_load_kw.size)

    def times(self) -> np.ndarray:
        """Seconds from the start of the run, one entry per step."""
        return np.arange(self.n_steps) * self.dt


def _stop_energy_sum(p: float, q: float) -> float:
    """Power-sum of discharging at ``p`` then ramping to zero at ``q`` per step.

    Returns ``sum_{k>=0} max(p - k*q, 0)``; multiplied by the step energy
    factor this is the minimum energy a ramp-limited device needs to carry
    power ``p`` for one step and still wind down legally. Evaluated exactly
    as ``(m + 1) * p - q * (m * (m + 1) / 2.0)`` with ``m = int(p // q)``
    (contractual expression: reimplementations must round identically).
    """
    if p <= 0.0:
        return 0.0
    if math.isinf(q):
        return p
    m = int(p // q)
    return (m + 1) * p - q * (m * (m + 1) / 2.0)


def _sustainable_power(u: float, q: float) -> float:
    """Largest ``p`` with ``_stop_energy_sum(p, q) <= u``.

    Evaluated exactly as ``(u + q * (m * (m + 1) / 2.0)) / (m + 1)`` for the
    largest integer ``m`` with ``q * ((m + 1) * (m + 2) / 2.0) <= u``
    (contractual expression, as above). Infinite ``u`` means no energy
    limit; infinite ``q`` means the whole charge is usable in one step.
    """
    if math.isinf(u):
        return math.inf
    if u <= 0.0:
        return 0.0
    if math.isinf(q):
        return u
    m = 0
    while q * ((m + 1) * (m + 2) / 2.0) <= u:
        m += 1
    return (u + q * (m * (m + 1) / 2.0)) / (m + 1)


def resolve_recharge_threshold(norm: NormalizedProfile, cfg: EmsConfig) -> float:
    """The recharge threshold actually used by dispatch.

    Explicit config wins; otherwise the base-load estimate is used, unless
    that estimate is not strictly below ``sc_threshold`` (degenerate flat-top
    profiles), in which case recharging is disabled via 0.
    """
    if cfg.recharge_threshold is not None:
        return cfg.recharge_threshold
    est = base_load_estimate(norm)
    return est if est < cfg.sc_threshold else 0.0


def dispatch(
    norm: NormalizedProfile,
    cfg: EmsConfig = EmsConfig(),
    dev: DeviceParams = DeviceParams(),
) -> DispatchResult:
    """Simulate the threshold split of a load between SC, VRFB, and grid.

    Per step ``t`` (``pu`` the per-unit series, ``P`` the profile peak in kW,
    ``d[t]`` the normalized forward derivative, 0 at the final step):

    1. The SC engages iff ``pu[t] > sc_threshold`` or, in
       ``THRESHOLD_OR_DERIVATIVE`` mode, ``|d[t]| > derivative_threshold``.
    2. Recharge steps are those with ``pu[t] < r`` (the resolved recharge
       threshold); then the SC charges first and the VRFB only once the SC
       is already full at the step start.
    3. When engaged, the SC serves the load portion above ``sc_threshold*P``,
       capped by its power rating and remaining charge. It has no ramp limit.
    4. The VRFB serves what remains above ``r*P``, capped by power, by its
       per-step ramp ``q = ramp*dt``, and by a wind-down energy reserve: it
       never carries more power than it could ramp back to zero on its
       remaining charge. The ramp bound also binds downward, so on a sudden
       load drop the battery keeps delivering and the grid absorbs the
       surplus (negative grid power).
    5. The grid is the slack: ``p_grid = p_load - p_sc - p_vrfb`` exactly.
    6. End-of-step state: ``soc = clamp(soc - delta, 0, capacity)``.

    The exact float expressions, in evaluation order (these, not prose, are
    the contract)::

        step_kwh = dt / 3600.0
        q        = vrfb_ramp_kw_per_s * dt
        thr_kw   = sc_threshold * P
        rth_kw   = r * P
        p_load   = pu[t] * P

        # SC (eff = sc_efficiency)
        charge:    p_sc = -min(sc_recharge_kw, sc_power_kw,
                               (sc_energy_kwh - soc_sc) / step_kwh / eff)
        discharge: p_sc = min(max(p_load - thr_kw, 0.0), sc_power_kw,
                              soc_sc / step_kwh * eff)

        # VRFB (eff = vrfb_efficiency)
        charge target:    -min(vrfb_recharge_kw,
                               (vrfb_energy_kwh - soc_v) / step_kwh / eff)
                          (0.0 unless soc_sc >= sc_energy_kwh at step start)
        discharge target: max(p_load - max(p_sc, 0.0) - rth_kw, 0.0)
        p = min(target, vrfb_power_kw); p = max(p, -vrfb_power_kw)
        p = min(p, prev + q);           p = max(p, prev - q)
        if p > 0.0:
            u = soc_v / step_kwh * eff
            if _stop_energy_sum(p, q) > u:
                p = _sustainable_power(u, q); p = max(p, prev - q)

        p_grid = p_load - p_sc - p
        delta  = (p / eff if p >= 0.0 else p * eff) * step_kwh   # per device
        soc    = min(max(soc - delta, 0.0), capacity)

    Raises
    ------
    IncompatibleResolutionError
        If the profile interval exceeds the supercapacitor limit (10 s);
        both engage modes place load on the SC.
    """
    if norm.dt > SC_MAX_DT_S:
        raise IncompatibleResolutionError(
            f"dt={norm.dt:g} s exceeds {SC_MAX_DT_S:g} s; supercapacitor dispatch "
            "needs finer sampling"
        )
    rth = resolve_recharge_threshold(norm, cfg)

    p_max = norm.base_power_kw
    dt = norm.dt
    step_kwh = dt / 3600.0
    q = dev.vrfb_ramp_kw_per_s * dt
    thr_kw = cfg.sc_threshold * p_max
    rth_kw = rth * p_max
    use_derivative = cfg.sc_engage_mode is EngageMode.THRESHOLD_OR_DERIVATIVE

    pu = norm.pu.tolist()
    n = len(pu)
    if use_derivative:
        dnorm = derivative(norm).normalized.tolist()
        dnorm.append(0.0)  # final step has no upcoming change
    else:
        dnorm = None

    cap_sc = dev.sc_energy_kwh
    cap_v = dev.vrfb_energy_kwh
    eff_sc = dev.sc_efficiency
    eff_v = dev.vrfb_efficiency
    r_sc = dev.sc_recharge_kw
    r_v = dev.vrfb_recharge_kw
    soc_sc = dev.sc_initial_soc_fraction * cap_sc
    soc_v = dev.vrfb_initial_soc_fraction * cap_v
    prev_v = 0.0

    p_load_a = [0.0] * n
    p_grid_a = [0.0] * n
    p_sc_a = [0.0] * n
    p_vrfb_a = [0.0] * n
    soc_sc_a = [0.0] * n
    soc_v_a = [0.0] * n
    flag_a = [False] * n
    engaged_a = [False] * n

    thr = cfg.sc_threshold
    dthr = cfg.derivative_threshold
    for t in range(n):
        x = pu[t]
        p_load = x * p_max
        flag = x > thr
        engaged = flag or (use_derivative and abs(dnorm[t]) > dthr)
        recharging = x < rth
        sc_full = soc_sc >= cap_sc

        if recharging:
            p_sc = -min(r_sc, dev.sc_power_kw, (cap_sc - soc_sc) / step_kwh / eff_sc)
        elif engaged:
            p_sc = min(max(p_load - thr_kw, 0.0), dev.sc_power_kw, soc_sc / step_kwh * eff_sc)
        else:
            p_sc = 0.0

        if recharging:
            target = -min(r_v, (cap_v - soc_v) / step_kwh / eff_v) if sc_full else 0.0
        else:
            target = max(p_load - max(p_sc, 0.0) - rth_kw, 0.0)
        p_v = min(target, dev.vrfb_power_kw)
        p_v = max(p_v, -dev.vrfb_power_kw)
        p_v = min(p_v, prev_v + q)
        p_v = max(p_v, prev_v - q)
        if p_v > 0.0:
            u = soc_v / step_kwh * eff_v
            if _stop_energy_sum(p_v, q) > u:
                p_v = _sustainable_power(u, q)
                p_v = max(p_v, prev_v - q)

        p_grid = p_load - p_sc - p_v

        d_sc = (p_sc / eff_sc if p_sc >= 0.0 else p_sc * eff_sc) * step_kwh
        d_v = (p_v / eff_v if p_v >= 0.0 else p_v * eff_v) * step_kwh
        soc_sc = min(max(soc_sc - d_sc, 0.0), cap_sc)
        soc_v = min(max(soc_v - d_v, 0.0), cap_v)

        p_load_a[t] = p_load
        p_grid_a[t] = p_grid
        p_sc_a[t] = p_sc
        p_vrfb_a[t] = p_v
        soc_sc_a[t] = soc_sc
        soc_v_a[t] = soc_v
        flag_a[t] = flag
        engaged_a[t] = engaged
        prev_v = p_v

    load = np.asarray(p_load_a)
    grid = np.asarray(p_grid_a)
    sc = np.asarray(p_sc_a)
    vrfb = np.asarray(p_vrfb_a)
    load_energy = float(load.sum())
    grid_peak = float(grid.max())
    stats = UtilizationStats(
        sc_engaged_fraction=float(np.mean(engaged_a)),
        sc_energy_share=float(np.clip(sc, 0.0, None).sum() / load_energy),
        vrfb_energy_share=float(np.clip(vrfb, 0.0, None).sum() / load_energy),
        grid_peak_kw=grid_peak,
        grid_peak_reduction_fraction=(p_max - grid_peak) / p_max,
    )
    return DispatchResult(
        dt=dt, base_power_kw=p_max,
        p_load_kw=load, p_grid_kw=grid, p_sc_kw=sc, p_vrfb_kw=vrfb,
        soc_sc_kwh=np.asarray(soc_sc_a), soc_vrfb_kwh=np.asarray(soc_v_a),
        flag_sc=np.asarray(flag_a), engaged_sc=np.asarray(engaged_a),
        recharge_threshold=rth, stats=stats,
    )


def threshold_sweep(
    norm: NormalizedProfile,
    thresholds: Sequence[float],
    cfg: EmsConfig = EmsConfig(),
    dev: DeviceParams = DeviceParams(),
) -> list[tuple[float, UtilizationStats]]:
    """Dispatch once per SC threshold and tabulate the utilization numbers.

    Thresholds must each lie in (0, 1) and be given in ascending order;
    rows come back in the same order. An empty list yields an empty table.
    """
    prev = 0.0
    for thr in thresholds:
        if not 0.0 < thr < 1.0:
            raise InvalidConfigError(f"sweep threshold must be in (0, 1), got {thr}")
        if thr < prev:
            raise InvalidConfigError("sweep thresholds must be ascending")
        prev = thr
    rows = []
    for thr in thresholds:
        result = dispatch(norm, replace(cfg, sc_threshold=thr), dev)
        rows.append((float(thr), result.stats))
    return rows


@dataclass(frozen=True)
class UpsScenario:
    """An island-mode exercise: the storage alone covers one outage window."""

    hess_demand: LoadProfile
    feasible: bool
    limiting: Limiting
    window_peak_kw: float
    window_energy_kwh: float
    power_cap_kw: float
    energy_available_kwh: float


def make_ups_scenario(
    profile: LoadProfile,
    outage_start_s: float,
    outage_duration_s: float,
    dev: DeviceParams = DeviceParams(),
) -> UpsScenario:
    """Zero the demand outside an outage window and check coverage feasibility.

    Inside the window the storage must carry the full load, so feasibility
    requires the window peak to stay within the combined power rating and
    the window energy within the stored energy at the initial SoC. When both
    constraints fail, the power violation is reported as limiting.

    Raises
    ------
    ResolutionTooCoarseError
        If ``profile.dt >= 30 s`` (peaks inside short outages average away).
    WindowOutOfRangeError
        If the window does not lie within the profile span.
    """
    if profile.dt >= UPS_MAX_DT_S:
        raise ResolutionTooCoarseError(
            f"dt={profile.dt:g} s too coarse for outage scenarios (need < {UPS_MAX_DT_S:g} s)"
        )
    if outage_duration_s <= 0.0:
        raise WindowOutOfRangeError(f"outage duration must be > 0, got {outage_duration_s}")
    span = profile.duration_s
    if outage_start_s < 0.0 or outage_start_s + outage_duration_s > span:
        raise WindowOutOfRangeError(
            f"window [{outage_start_s}, {outage_start_s + outage_duration_s}) s "
            f"outside profile span [0, {span}) s"
        )

    offsets = np.arange(profile.n_samples) * profile.dt
    in_window = (offsets >= outage_start_s) & (offsets < outage_start_s + outage_duration_s)
    demand = np.where(in_window, profile.samples, 0.0)

    window_peak = float(profile.samples[in_window].max()) if in_window.any() else 0.0
    window_energy = float(profile.samples[in_window].sum() * profile.dt / 3600.0)
    power_cap = dev.vrfb_power_kw + dev.sc_power_kw
    energy_avail = (
        dev.vrfb_energy_kwh * dev.vrfb_initial_soc_fraction
        + dev.sc_energy_kwh * dev.sc_initial_soc_fraction
    )
    if window_peak > power_cap:
        limiting = Limiting.POWER
    elif window_energy > energy_avail:
        limiting = Limiting.ENERGY
    else:
        limiting = Limiting.NONE

    return UpsScenario(
        hess_demand=LoadProfile(
            site_id=f"{profile.site_id}:ups", category_hint=profile.category_hint,
            t0=profile.t0, dt=profile.dt, samples=demand,
        ),
        feasible=limiting is Limiting.NONE,
        limiting=limiting,
        window_peak_kw=window_peak,
        window_energy_kwh=window_energy,
        power_cap_kw=power_cap,
        energy_available_kwh=energy_avail,
    )


def write_dispatch_csv(result: DispatchResult, target: Union[str, Path, IO]) -> None:
    """Write the per-step trace as CSV.

    Columns: ``t,p_load_kw,p_grid_kw,p_sc_kw,p_vrfb_kw,soc_sc_kwh,
    soc_vrfb_kwh,flag_sc`` with ``t`` in seconds from the run start.
    """
    own = isinstance(target, (str, Path))
    fh = open(target, "w", encoding="utf-8", newline="") if own else target
    try:
        writer = csv.writer(fh)
        writer.writerow(["t", "p_load_kw", "p_grid_kw", "p_sc_kw", "p_vrfb_kw",
                         "soc_sc_kwh", "soc_vrfb_kwh", "flag_sc"])
        for i in range(result.n_steps):
            writer.writerow([
                repr(i * result.dt),
                repr(float(result.p_load_kw[i])),
                repr(float(result.p_grid_kw[i])),
                repr(float(result.p_sc_kw[i])),
                repr(float(result.p_vrfb_kw[i])),
                repr(float(result.soc_sc_kwh[i])),
                repr(float(result.soc_vrfb_kwh[i])),
                int(result.flag_sc[i]),
            ])
    finally:
        if own:
            fh.close()


def write_sweep_csv(
    rows: Sequence[tuple[float, UtilizationStats]], target: Union[str, Path, IO]
) -> None:
    """Write a threshold sweep table as CSV.

    Columns: ``threshold,sc_engaged_fraction,sc_energy_share,
    vrfb_energy_share,grid_peak_kw``.
    """
    own = isinstance(target, (str, Path))
    fh = open(target, "w", encoding="utf-8", newline="") if own else target
    try:
        writer = csv.writer(fh)
        writer.writerow(["threshold", "sc_engaged_fraction", "sc_energy_share",
                         "vrfb_energy_share", "grid_peak_kw"])
        for thr, stats in rows:
            writer.writerow([
                repr(float(thr)),
                repr(stats.sc_engaged_fraction),
                repr(stats.sc_energy_share),
                repr(stats.vrfb_energy_share),
                repr(stats.grid_peak_kw),
            ])
    finally:
        if own:
            fh.close()


def dispatch_to_csv(result: DispatchResult) -> str:
    buf = io.StringIO()
    write_dispatch_csv(result, buf)
    return buf.getvalue()


def sweep_to_csv(rows: Sequence[tuple[float, UtilizationStats]]) -> str:
    buf = io.StringIO()
    write_sweep_csv(rows, buf)
    return buf.getvalue()
