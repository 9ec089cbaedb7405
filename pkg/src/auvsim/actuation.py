"""Thruster models and control allocation.

A normalized command passes through a dead zone, a power-law steady
thrust curve with saturation at bollard thrust, and a first-order lag;
the per-thruster forces map to a body generalized force through the
allocation matrix.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import GeneralizedForce


class CommandOutOfRange(Exception):
    """Normalized thruster command outside [-1, 1]."""


class DimensionMismatch(Exception):
    """Allocation matrix and control vector shapes disagree."""


@dataclass(frozen=True)
class ThrusterParams:
    max_thrust: float = 300.0      # N, bollard
    dead_zone: float = 0.05        # normalized command fraction
    time_constant: float = 0.2     # s, first-order lag
    curve_exponent: float = 2.0    # thrust ~ (effective command)^n
    max_rpm: float = 1500.0        # rpm reported at bollard thrust

    def __post_init__(self):
        if self.max_thrust <= 0:
            raise ValueError("max_thrust must be positive")
        if not 0 <= self.dead_zone < 1:
            raise ValueError("dead_zone must be in [0, 1)")
        if self.time_constant <= 0:
            raise ValueError("time_constant must be positive")
        if self.curve_exponent < 1:
            raise ValueError("curve_exponent must be >= 1")


@dataclass(frozen=True)
class ThrusterState:
    command: float = 0.0   # last commanded value, normalized
    thrust: float = 0.0    # N, after lag
    rpm: float = 0.0       # reported display channel


@dataclass
class AllocationMatrix:
    """6 x n map from thruster forces to body generalized force."""

    entries: np.ndarray
    positions: np.ndarray | None = None  # n x 3 geometry metadata, m
    axes: np.ndarray | None = None       # n x 3 unit thrust axes

    def __post_init__(self):
        self.entries = np.ascontiguousarray(self.entries, dtype=float)
        if self.entries.ndim != 2 or self.entries.shape[0] != 6:
            raise ValueError("allocation matrix must be 6 x n")
        if self.entries.shape[1] < 1:
            raise ValueError("at least one thruster required")

    @property
    def n_thrusters(self) -> int:
        return self.entries.shape[1]


@dataclass(frozen=True)
class ControlVector:
    forces: tuple  # N per thruster

    def as_array(self) -> np.ndarray:
        return np.array(self.forces, dtype=float)


def default_allocation(lever_arm: float = 0.4) -> AllocationMatrix:
    """Stern axial thruster plus a lateral pair, all axes forward.

    The lateral pair sits at +/-lever_arm in sway so a differential
    command produces a pure yaw moment.
    """
    positions = np.array(
        [[-2.0, 0.0, 0.0], [-1.0, -lever_arm, 0.0], [-1.0, lever_arm, 0.0]]
    )
    axes = np.array([[1.0, 0.0, 0.0]] * 3)
    cols = []
    for pos, ax in zip(positions, axes):
        cols.append(np.concatenate([ax, np.cross(pos, ax)]))
    return AllocationMatrix(np.column_stack(cols), positions=positions, axes=axes)


def steady_thrust(params: ThrusterParams, cmd: float) -> float:
    """Steady-state thrust for a normalized command.

    Zero inside the dead zone, then a power-law rise to bollard thrust
    at full command; odd-symmetric and continuous at the dead-zone edge.
    """
    if not math.isfinite(cmd) or abs(cmd) > 1:
        raise CommandOutOfRange("command %r outside [-1, 1]" % (cmd,))
    mag = abs(cmd)
    if mag <= params.dead_zone:
        return 0.0
    eff = (mag - params.dead_zone) / (1.0 - params.dead_zone)
    return math.copysign(params.max_thrust * eff ** params.curve_exponent, cmd)


def thruster_step(
    state: ThrusterState, params: ThrusterParams, cmd: float, dt: float
) -> ThrusterState:
    """First-order lag of the actual thrust toward the steady curve."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    target = steady_thrust(params, cmd)
    alpha = 1.0 - math.exp(-dt / params.time_constant)
    thrust = state.thrust + (target - state.thrust) * alpha
    thrust = max(-params.max_thrust, min(params.max_thrust, thrust))
    rpm = params.max_rpm * math.copysign(
        math.sqrt(abs(thrust) / params.max_thrust), thrust
    )
    return ThrusterState(command=cmd, thrust=thrust, rpm=rpm)


def allocate(b: AllocationMatrix, u) -> GeneralizedForce:
    """tau = B u."""
    forces = u.as_array() if isinstance(u, ControlVector) else np.asarray(u, dtype=float)
    if forces.shape != (b.n_thrusters,):
        raise DimensionMismatch(
            "control vector has %d entries, allocation expects %d"
            % (forces.size, b.n_thrusters)
        )
    return GeneralizedForce.from_array(b.entries @ forces)


def surge_budget(b: AllocationMatrix, max_thrust: float) -> float:
    """Total surge force at full forward command on every thruster."""
    return float(b.entries[0] @ np.full(b.n_thrusters, max_thrust))


def validate_surge_budget(
    b: AllocationMatrix, max_thrust: float, cap: float = 900.0
) -> None:
    total = surge_budget(b, max_thrust)
    if total > cap + 1e-9:
        raise ValueError(
            "full forward command yields %.1f N surge, above the %.0f N cap"
            % (total, cap)
        )
