"""Heading-lock autopilot: error wrap, PID law and thrust mixing.

The loop runs at a fixed 30 ms period. Errors are handled in degrees
and gains in command-percent per degree, so the raw PID output divides
by 100 to give a normalized yaw command. In heading-lock mode the yaw
command is mixed differentially onto the lateral thruster pair around
the cruise trim; manual mode passes operator commands straight through.
"""

from dataclasses import dataclass, replace

MANUAL = "manual"
HEADING_LOCK = "heading_lock"

CONTROL_PERIOD = 0.030  # s


class NotEngaged(Exception):
    """PID step requested while the autopilot is in manual mode."""


@dataclass(frozen=True)
class PidGains:
    kp: float = 5.0
    ki: float = 0.0
    kd: float = 0.0

    def __post_init__(self):
        if self.kp < 0 or self.ki < 0 or self.kd < 0:
            raise ValueError("PID gains must be nonnegative")


@dataclass(frozen=True)
class AutopilotState:
    mode: str = MANUAL
    heading_setpoint: float = 0.0       # deg, [0, 360)
    cruise_thrust: float = 0.0          # normalized [0, 1]
    integral: float = 0.0               # deg * s, anti-windup clamped
    last_error: float = 0.0             # deg
    sample_period: float = CONTROL_PERIOD
    manual_thrust: tuple = (0.0, 0.0, 0.0)


@dataclass(frozen=True)
class ActuatorCommand:
    per_thruster: tuple  # normalized, each clamped to [-1, 1]


def _clamp(x, lo=-1.0, hi=1.0):
    return max(lo, min(hi, x))


def heading_error(setpoint: float, psi: float) -> float:
    """Shortest-path heading error in [-180, 180) degrees."""
    return (setpoint - psi + 180.0) % 360.0 - 180.0


def pid_step(gains: PidGains, state: AutopilotState, error: float):
    """One PID evaluation; returns (yaw command, updated state)."""
    if state.mode != HEADING_LOCK:
        raise NotEngaged("autopilot is in manual mode")
    dt = state.sample_period
    integral = state.integral + error * dt
    if gains.ki > 0:
        # keep the integral contribution within +/-100 % command
        bound = 100.0 / gains.ki
        integral = _clamp(integral, -bound, bound)
    derivative = (error - state.last_error) / dt
    raw = gains.kp * error + gains.ki * integral + gains.kd * derivative
    yaw_command = _clamp(raw / 100.0)
    return yaw_command, replace(state, integral=integral, last_error=error)


def engage(state: AutopilotState, setpoint: float, gains: PidGains) -> AutopilotState:
    """Switch to heading lock with a clean controller history.

    The cruise thrust carried over from the manual phase is preserved;
    integral and derivative history reset for a bumpless start. Gains
    are validated here and applied by the caller's control loop.
    """
    if gains is not None and not isinstance(gains, PidGains):
        gains = PidGains(*gains)
    return replace(
        state,
        mode=HEADING_LOCK,
        heading_setpoint=setpoint % 360.0,
        integral=0.0,
        last_error=0.0,
    )


def disengage(state: AutopilotState) -> AutopilotState:
    return replace(state, mode=MANUAL, integral=0.0, last_error=0.0)


def control_tick(state: AutopilotState, gains: PidGains, measured_psi: float):
    """One 30 ms control period; returns (ActuatorCommand, new state).

    Thruster order is (axial, port, starboard): positive yaw command
    raises port thrust and lowers starboard, turning toward increasing
    heading.
    """
    if state.mode == MANUAL:
        cmd = tuple(_clamp(c) for c in state.manual_thrust)
        return ActuatorCommand(cmd), state
    error = heading_error(state.heading_setpoint, measured_psi)
    yaw_command, state = pid_step(gains, state, error)
    axial = _clamp(state.cruise_thrust)
    port = _clamp(state.cruise_thrust + yaw_command)
    starboard = _clamp(state.cruise_thrust - yaw_command)
    return ActuatorCommand((axial, port, starboard)), state
