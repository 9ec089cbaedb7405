"""Closed-loop simulation: dynamics + thrusters + autopilot + channels.

A Simulation owns one vehicle and is advanced tick by tick (30 ms
control period, 6 RK4 substeps at 5 ms by default) by exactly one
caller. Operator commands are applied between ticks, never mid-tick,
so the trajectory is a pure function of the initial state and the
ordered command log.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import autopilot, telemetry
from .actuation import ThrusterState, allocate, thruster_step
from .autopilot import AutopilotState, PidGains, control_tick
from .dynamics import BodyVelocity, GeneralizedForce, Pose, SimState, step
from .params import ParameterSet


@dataclass
class _Disturbance:
    yaw_moment: float = 0.0  # N*m, constant fin/fairing misalignment stand-in

    def force(self) -> GeneralizedForce:
        return GeneralizedForce(mz=self.yaw_moment)


class Simulation:
    def __init__(
        self,
        pset: ParameterSet,
        gains: PidGains = PidGains(),
        dt: float = 0.005,
        control_period: float = autopilot.CONTROL_PERIOD,
        disturbance_yaw: float = 0.0,
        initial_state: SimState | None = None,
    ):
        substeps = control_period / dt
        if abs(substeps - round(substeps)) > 1e-9:
            raise ValueError("dt must divide the control period")
        self.pset = pset
        self.dt = dt
        self.control_period = control_period
        self.substeps = round(substeps)
        self.gains = gains
        self.disturbance = _Disturbance(disturbance_yaw)
        self.state = initial_state or SimState(0.0, Pose(), BodyVelocity())
        self.thrusters = [ThrusterState() for _ in range(pset.allocation.n_thrusters)]
        self.ap = AutopilotState()
        self.tick_index = 0

    @property
    def time(self) -> float:
        return self.state.time

    def yaw_deg(self) -> float:
        return math.degrees(self.state.pose.psi) % 360.0

    def apply_command(self, cmd: telemetry.Command) -> None:
        """Apply one validated operator command (between ticks)."""
        if isinstance(cmd, telemetry.SetManualThrust):
            self.ap = autopilot.replace(
                self.ap, manual_thrust=cmd.thrust, cruise_thrust=cmd.thrust[0]
            )
        elif isinstance(cmd, telemetry.Engage):
            self.gains = PidGains(cmd.kp, cmd.ki, cmd.kd)
            self.ap = autopilot.engage(self.ap, cmd.setpoint, self.gains)
        elif isinstance(cmd, telemetry.Disengage):
            self.ap = autopilot.disengage(self.ap)
        elif isinstance(cmd, telemetry.SetGains):
            self.gains = PidGains(cmd.kp, cmd.ki, cmd.kd)
        elif isinstance(cmd, telemetry.SetCruiseThrust):
            self.ap = autopilot.replace(self.ap, cruise_thrust=cmd.value)
        else:
            raise TypeError("unknown command %r" % (cmd,))

    def engage(self, setpoint: float, gains: PidGains | None = None) -> None:
        if gains is not None:
            self.gains = gains
        self.ap = autopilot.engage(self.ap, setpoint, self.gains)

    def set_manual_thrust(self, thrust) -> None:
        thrust = tuple(float(v) for v in thrust)
        self.ap = autopilot.replace(
            self.ap, manual_thrust=thrust, cruise_thrust=thrust[0]
        )

    def tick(self, substep_hook=None):
        """Advance one control period; returns the ActuatorCommand used."""
        cmd, self.ap = control_tick(self.ap, self.gains, self.yaw_deg())
        w = self.disturbance.force()
        for _ in range(self.substeps):
            for i, ts in enumerate(self.thrusters):
                self.thrusters[i] = thruster_step(
                    ts, self.pset.thruster, cmd.per_thruster[i], self.dt
                )
            u = np.array([t.thrust for t in self.thrusters])
            tau = allocate(self.pset.allocation, u)
            self.state = step(self.pset.vehicle, self.state, tau, w, self.dt)
            if substep_hook is not None:
                substep_hook(self)
        self.tick_index += 1
        return cmd

    def telemetry_frame(self, timestamp_ms: int) -> telemetry.TelemetryFrame:
        pose = self.state.pose
        depth = pose.z
        wrap180 = lambda a: (a + 180.0) % 360.0 - 180.0
        return telemetry.TelemetryFrame(
            timestamp_ms=timestamp_ms,
            roll=wrap180(math.degrees(pose.phi)),
            pitch=wrap180(math.degrees(pose.theta)),
            yaw=self.yaw_deg(),
            depth=depth,
            altitude=self.pset.lakebed_depth - depth,
            obstacle=-1.0,
            rpm=tuple(int(round(t.rpm)) for t in self.thrusters),
            leak=(False,) * 8,
            voltage=self.pset.supply_voltage,
        )
