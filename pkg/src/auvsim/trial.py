"""Heading-lock trial harness.

Scripts the field experiment: manual cruise, engage at a heading
offset, record every control tick, then reduce the trace to settling
and steady-state metrics. A bisection calibrator finds the constant
yaw disturbance that reproduces a target steady-state error, and a
gain-comparison runner produces the per-gain report.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .autopilot import CONTROL_PERIOD, PidGains, heading_error
from .params import ParameterSet
from .sim import Simulation


class EmptyRecord(Exception):
    pass


class CalibrationFailed(Exception):
    pass


@dataclass(frozen=True)
class TrialConfig:
    cruise_thrust: float = 0.30
    warmup_seconds: float = 2.0
    heading_setpoint: float = 60.0     # deg; vehicle starts at heading 0
    gains: PidGains = field(default_factory=PidGains)
    disturbance_yaw_moment: float = 0.0
    duration: float = 60.0             # s recorded after engage
    dt: float = 0.005
    error_band: float = 2.0            # deg, settling band half-width

    def __post_init__(self):
        if self.duration <= 0 or self.warmup_seconds < 0:
            raise ValueError("bad durations")
        ratio = CONTROL_PERIOD / self.dt
        if abs(ratio - round(ratio)) > 1e-9:
            raise ValueError("dt must divide the 30 ms control period")
        if not 0 <= self.cruise_thrust <= 1:
            raise ValueError("cruise thrust must be in [0, 1]")


@dataclass(frozen=True)
class TrialSample:
    t: float          # s since engage
    yaw: float        # deg [0, 360)
    setpoint: float   # deg
    error: float      # deg [-180, 180)
    commands: tuple   # per-thruster normalized


@dataclass
class TrialRecord:
    samples: list
    config: TrialConfig
    params_hash: str
    valid: bool = True


@dataclass(frozen=True)
class TrialMetrics:
    settling_time: float        # s; inf if the band is never held
    steady_state_error: float   # deg, mean |error| over the final 20 %
    overshoot_count: int        # setpoint crossings after engage
    time_to_band: float         # s; inf if the band is never entered


def run_trial(pset: ParameterSet, config: TrialConfig) -> TrialRecord:
    """Manual cruise, engage, record every control tick. Deterministic."""
    sim = Simulation(
        pset,
        gains=config.gains,
        dt=config.dt,
        disturbance_yaw=config.disturbance_yaw_moment,
    )
    c = config.cruise_thrust
    sim.set_manual_thrust((c, c, c))
    samples = []
    record = TrialRecord(samples, config, pset.source_hash)
    try:
        for _ in range(round(config.warmup_seconds / CONTROL_PERIOD)):
            sim.tick()
        sim.engage(config.heading_setpoint, config.gains)
        t0 = sim.time
        for _ in range(round(config.duration / CONTROL_PERIOD)):
            cmd = sim.tick()
            yaw = sim.yaw_deg()
            samples.append(
                TrialSample(
                    t=sim.time - t0,
                    yaw=yaw,
                    setpoint=config.heading_setpoint % 360.0,
                    error=heading_error(config.heading_setpoint, yaw),
                    commands=cmd.per_thruster,
                )
            )
    except Exception:
        record.valid = False
        raise
    return record


def metrics_from_series(t, errors, error_band: float) -> TrialMetrics:
    """Reduce an (already engaged) error trace to trial metrics.

    The convergence band is centered on the trace's own steady-state
    offset (mean signed error over the final 20 %), since a constant
    disturbance leaves a proportional-only loop short of the setpoint.
    """
    t = np.asarray(t, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if t.size == 0:
        raise EmptyRecord("no samples")
    tail = errors[-max(1, t.size // 5):]
    center = float(np.mean(tail))
    sse = float(np.mean(np.abs(tail)))

    in_band = np.abs(errors - center) <= error_band
    time_to_band = float(t[np.argmax(in_band)]) if in_band.any() else math.inf
    settling_time = math.inf
    if in_band.all():
        settling_time = float(t[0])
    else:
        last_out = np.max(np.nonzero(~in_band))
        if last_out + 1 < in_band.size:
            settling_time = float(t[last_out + 1])

    signs = np.sign(errors)
    signs = signs[signs != 0]
    overshoot = int(np.count_nonzero(np.diff(signs) != 0))
    return TrialMetrics(
        settling_time=settling_time,
        steady_state_error=sse,
        overshoot_count=overshoot,
        time_to_band=time_to_band,
    )


def compute_metrics(record: TrialRecord, error_band: float | None = None) -> TrialMetrics:
    if not record.samples:
        raise EmptyRecord("trial record holds no samples")
    band = record.config.error_band if error_band is None else error_band
    return metrics_from_series(
        [s.t for s in record.samples],
        [s.error for s in record.samples],
        band,
    )


# ---------------------------------------------------------------------------
# Disturbance calibration


def steady_yaw_moment(pset: ParameterSet, cruise: float, yaw_command: float) -> float:
    """Steady yaw moment for a given cruise trim and yaw command."""
    from .actuation import steady_thrust

    clamp = lambda x: max(-1.0, min(1.0, x))
    forces = np.array(
        [
            steady_thrust(pset.thruster, clamp(cruise)),
            steady_thrust(pset.thruster, clamp(cruise + yaw_command)),
            steady_thrust(pset.thruster, clamp(cruise - yaw_command)),
        ]
    )
    return float(pset.allocation.entries[5] @ forces)


def linearized_sse(
    pset: ParameterSet, kp: float, moment: float, cruise: float = 0.30
) -> float:
    """Closed-form steady-state error of the linearized yaw loop, deg.

    At steady state the control moment balances the disturbance; with
    gain slope k = dM/d(yaw command) at the trim point, e = 100 M / (k kp).
    """
    h = 1e-4
    k = (
        steady_yaw_moment(pset, cruise, h) - steady_yaw_moment(pset, cruise, -h)
    ) / (2 * h)
    if k <= 0 or kp <= 0:
        raise CalibrationFailed("yaw authority or gain is zero")
    return 100.0 * moment / (k * kp)


def calibrate_disturbance(
    pset: ParameterSet,
    kp: float = 5.0,
    target_sse: float = 8.0,
    config: TrialConfig | None = None,
    tolerance: float = 0.1,
) -> float:
    """Bisect the constant yaw moment that yields the target SSE at kp."""
    if target_sse == 0:
        return 0.0
    base = config or TrialConfig(duration=40.0)
    base = replace(base, gains=PidGains(kp, 0.0, 0.0))
    # the moment opposes the commanded turn, so the loop stops short of
    # the setpoint instead of being pushed through it
    sign = -1.0 if heading_error(base.heading_setpoint, 0.0) >= 0 else 1.0

    def measured(moment: float) -> float:
        rec = run_trial(pset, replace(base, disturbance_yaw_moment=sign * moment))
        return compute_metrics(rec).steady_state_error

    # bracket: SSE grows with the disturbance until yaw authority saturates
    max_moment = abs(steady_yaw_moment(pset, base.cruise_thrust, 1.0))
    predicted = target_sse / linearized_sse(pset, kp, 1.0, base.cruise_thrust)
    lo, hi = 0.0, min(max(1.0, 1.5 * predicted), max_moment)
    while measured(hi) < target_sse:
        hi *= 2.0
        if hi > max_moment:
            raise CalibrationFailed(
                "target SSE %.2f deg unreachable within yaw authority" % target_sse
            )
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        sse = measured(mid)
        if abs(sse - target_sse) <= tolerance:
            return sign * mid
        if sse < target_sse:
            lo = mid
        else:
            hi = mid
    raise CalibrationFailed("bisection did not converge")


# ---------------------------------------------------------------------------
# Gain comparison


@dataclass(frozen=True)
class GainResult:
    kp: float
    metrics: TrialMetrics
    record: TrialRecord
    time_to_common_band: float = math.inf


@dataclass
class ComparisonReport:
    results: list              # GainResult, in the requested gain order
    common_band: float         # deg, shared |error| threshold
    time_to_band_deltas: dict  # (kp_a, kp_b) -> delta seconds at the common band

    def row(self, kp: float) -> GainResult:
        for r in self.results:
            if r.kp == kp:
                return r
        raise KeyError(kp)


def compare_gains(pset: ParameterSet, config: TrialConfig, gain_list) -> ComparisonReport:
    """Run one trial per gain under identical disturbance and setpoint.

    Per-gain metrics use each trial's own steady-state band; the paired
    speed comparison samples the same absolute error threshold for every
    gain (the largest steady-state error among the trials plus the
    settling band), since each gain levels out at a different offset.
    """
    gains = list(gain_list)
    if len(gains) < 2:
        raise ValueError("need at least two gain settings to compare")
    results = []
    for kp in gains:
        cfg = replace(config, gains=PidGains(kp, config.gains.ki, config.gains.kd))
        rec = run_trial(pset, cfg)
        results.append(GainResult(kp=kp, metrics=compute_metrics(rec), record=rec))

    common = max(r.metrics.steady_state_error for r in results) + config.error_band
    timed = []
    for r in results:
        t = np.array([s.t for s in r.record.samples])
        e = np.abs([s.error for s in r.record.samples])
        hit = e <= common
        ttb = float(t[np.argmax(hit)]) if hit.any() else math.inf
        timed.append(replace(r, time_to_common_band=ttb))
    results = timed

    deltas = {}
    for i, a in enumerate(results):
        for b in results[i + 1:]:
            deltas[(a.kp, b.kp)] = a.time_to_common_band - b.time_to_common_band
    return ComparisonReport(results=results, common_band=common,
                            time_to_band_deltas=deltas)
