"""Deterministic 6-DOF AUV simulator with a PID heading-lock autopilot,
thruster models, a newline-delimited telemetry/command protocol and a
gain-comparison trial harness."""

__version__ = "0.1.0"

from .actuation import (
    AllocationMatrix,
    ControlVector,
    ThrusterParams,
    ThrusterState,
    allocate,
    default_allocation,
    steady_thrust,
    thruster_step,
)
from .autopilot import (
    ActuatorCommand,
    AutopilotState,
    PidGains,
    control_tick,
    disengage,
    engage,
    heading_error,
    pid_step,
)
from .dynamics import (
    BodyVelocity,
    GeneralizedForce,
    Pose,
    SimState,
    SingularAttitude,
    SingularInertia,
    VehicleParams,
    acceleration,
    coriolis_matrix,
    damping_force,
    kinematic_transform,
    restoring_force,
    step,
)
from .params import ParameterSet, load_default_params, load_params
from .sim import Simulation
from .trial import (
    TrialConfig,
    TrialMetrics,
    TrialRecord,
    calibrate_disturbance,
    compare_gains,
    compute_metrics,
    run_trial,
)
