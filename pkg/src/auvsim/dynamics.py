"""Six-degree-of-freedom vehicle dynamics and fixed-step integration.

State convention: earth-fixed NED positions (z positive down) with Z-Y-X
Euler angles, body-fixed forward-right-down velocities. The equations of
motion couple a kinematic transform, a combined rigid-body/added-mass
inertia, a Coriolis/centripetal term, diagonal linear+quadratic damping
and gravity/buoyancy restoring forces.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels

PITCH_GUARD = np.pi / 2 - 1e-6


class SingularAttitude(Exception):
    """Pitch too close to +/-90 deg for the Euler-angle kinematics."""


class SingularInertia(Exception):
    """Combined inertia matrix is not invertible to tolerance."""


def _wrap_pi(a: float) -> float:
    return float((a + np.pi) % (2 * np.pi) - np.pi)


def _skew(v: np.ndarray) -> np.ndarray:
    return np.array(
        [[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]], [-v[1], v[0], 0.0]]
    )


@dataclass
class Pose:
    """Earth-fixed position and Euler attitude."""

    x: float = 0.0
    y: float = 0.0
    z: float = 0.0
    phi: float = 0.0
    theta: float = 0.0
    psi: float = 0.0

    def __post_init__(self):
        self.phi = _wrap_pi(self.phi)
        self.psi = _wrap_pi(self.psi)
        if abs(self.theta) >= PITCH_GUARD:
            raise SingularAttitude(
                "pitch %.6f rad is inside the +/-90 deg singularity guard" % self.theta
            )

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z, self.phi, self.theta, self.psi])

    @classmethod
    def from_array(cls, a) -> "Pose":
        return cls(*(float(v) for v in a))


@dataclass
class BodyVelocity:
    """Body-frame velocities: surge, sway, heave, roll/pitch/yaw rates."""

    u: float = 0.0
    v: float = 0.0
    w: float = 0.0
    p: float = 0.0
    q: float = 0.0
    r: float = 0.0

    def __post_init__(self):
        if not np.all(np.isfinite(self.as_array())):
            raise ValueError("body velocity components must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.u, self.v, self.w, self.p, self.q, self.r])

    @classmethod
    def from_array(cls, a) -> "BodyVelocity":
        return cls(*(float(v) for v in a))


@dataclass
class GeneralizedForce:
    """Body-frame force/moment 6-vector."""

    fx: float = 0.0
    fy: float = 0.0
    fz: float = 0.0
    mx: float = 0.0
    my: float = 0.0
    mz: float = 0.0

    def __post_init__(self):
        if not np.all(np.isfinite(self.as_array())):
            raise ValueError("force components must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.fx, self.fy, self.fz, self.mx, self.my, self.mz])

    @classmethod
    def from_array(cls, a) -> "GeneralizedForce":
        return cls(*(float(v) for v in a))


@dataclass
class SimState:
    time: float
    pose: Pose
    velocity: BodyVelocity


@dataclass
class VehicleParams:
    """Mass, hydrodynamic and geometric properties of the hull.

    The combined inertia (rigid body + added mass) is precomputed and
    factorized once; it must be symmetric positive definite.
    """

    mass: float
    inertia: np.ndarray          # 3x3 about the body origin
    added_mass: np.ndarray       # 6x6, symmetric PSD
    d1: np.ndarray               # 6 linear damping coefficients
    d2: np.ndarray               # 6 quadratic damping coefficients
    weight: float                # N
    buoyancy: float              # N
    cg: np.ndarray               # m, body frame
    cb: np.ndarray               # m, body frame
    length: float = 0.0
    hull_diameter: float = 0.0

    rigid_mass: np.ndarray = field(init=False, repr=False)
    combined_mass: np.ndarray = field(init=False, repr=False)
    combined_mass_inv: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.inertia = np.ascontiguousarray(self.inertia, dtype=float).reshape(3, 3)
        self.added_mass = np.ascontiguousarray(self.added_mass, dtype=float).reshape(6, 6)
        self.d1 = np.ascontiguousarray(self.d1, dtype=float).reshape(6)
        self.d2 = np.ascontiguousarray(self.d2, dtype=float).reshape(6)
        self.cg = np.ascontiguousarray(self.cg, dtype=float).reshape(3)
        self.cb = np.ascontiguousarray(self.cb, dtype=float).reshape(3)

        if self.mass <= 0:
            raise ValueError("mass must be positive")
        if not np.allclose(self.inertia, self.inertia.T, atol=1e-9):
            raise ValueError("inertia tensor must be symmetric")
        if np.any(np.linalg.eigvalsh(self.inertia) <= 0):
            raise ValueError("inertia tensor must be positive definite")
        if not np.allclose(self.added_mass, self.added_mass.T, atol=1e-9):
            raise ValueError("added mass matrix must be symmetric")
        if np.any(np.linalg.eigvalsh(self.added_mass) < -1e-9):
            raise ValueError("added mass matrix must be positive semidefinite")
        if np.any(self.d1 < 0) or np.any(self.d2 < 0):
            raise ValueError("damping coefficients must be nonnegative")

        s_cg = _skew(self.cg)
        mr = np.zeros((6, 6))
        mr[:3, :3] = self.mass * np.eye(3)
        mr[:3, 3:] = -self.mass * s_cg
        mr[3:, :3] = self.mass * s_cg
        mr[3:, 3:] = self.inertia
        self.rigid_mass = mr
        m = mr + self.added_mass
        if np.any(np.linalg.eigvalsh(0.5 * (m + m.T)) <= 0):
            raise ValueError("combined inertia must be positive definite")
        if 1.0 / np.linalg.cond(m) < 1e-9:
            raise SingularInertia("combined inertia is singular to tolerance")
        self.combined_mass = np.ascontiguousarray(m)
        self.combined_mass_inv = np.ascontiguousarray(np.linalg.inv(m))


def kinematic_transform(pose: Pose, vel: BodyVelocity) -> np.ndarray:
    """Earth-frame pose rates J(x) q-dot for the given body velocity."""
    if abs(pose.theta) >= PITCH_GUARD:
        raise SingularAttitude("pitch %.6f rad too close to +/-90 deg" % pose.theta)
    v = vel.as_array()
    out = np.empty(6)
    out[:3] = _kernels.rotation_matrix(pose.phi, pose.theta, pose.psi) @ v[:3]
    out[3:] = _kernels.euler_rate_matrix(pose.phi, pose.theta) @ v[3:]
    return out


def coriolis_matrix(m: np.ndarray, vel: BodyVelocity) -> np.ndarray:
    """Skew-symmetric Coriolis/centripetal matrix C(v) built from M v."""
    m = np.asarray(m, dtype=float)
    if m.shape != (6, 6):
        raise ValueError("M must be 6x6")
    v = vel.as_array()
    a = m[:3, :3] @ v[:3] + m[:3, 3:] @ v[3:]
    b = m[3:, :3] @ v[:3] + m[3:, 3:] @ v[3:]
    c = np.zeros((6, 6))
    sa = _skew(a)
    c[:3, 3:] = -sa
    c[3:, :3] = -sa
    c[3:, 3:] = -_skew(b)
    return c


def damping_force(params: VehicleParams, vel: BodyVelocity) -> GeneralizedForce:
    """Diagonal drag force, opposing each velocity component."""
    return GeneralizedForce.from_array(
        _kernels.damping_vector(params.d1, params.d2, vel.as_array())
    )


def restoring_force(params: VehicleParams, pose: Pose) -> GeneralizedForce:
    """Net gravity/buoyancy force and moment acting on the hull.

    Signs follow the physical force: at level attitude the heave
    component is W - B, i.e. negative when the hull is positively
    buoyant (lift in the z-down frame).
    """
    return GeneralizedForce.from_array(
        _kernels.restoring_vector(
            pose.phi, pose.theta, pose.psi,
            params.weight, params.buoyancy, params.cg, params.cb,
        )
    )


def acceleration(
    params: VehicleParams,
    state: SimState,
    tau: GeneralizedForce,
    w: GeneralizedForce,
) -> np.ndarray:
    """Body-frame acceleration from the equation of motion."""
    m = params.combined_mass
    if 1.0 / np.linalg.cond(m) < 1e-9:
        raise SingularInertia("combined inertia is singular to tolerance")
    vel = state.velocity
    rhs = (
        tau.as_array()
        + w.as_array()
        + restoring_force(params, state.pose).as_array()
        - coriolis_matrix(m, vel) @ vel.as_array()
        + damping_force(params, vel).as_array()
    )
    return np.linalg.solve(m, rhs)


def step(
    params: VehicleParams,
    state: SimState,
    tau: GeneralizedForce,
    w: GeneralizedForce,
    dt: float,
) -> SimState:
    """Advance one fixed RK4 step of duration dt.

    Deterministic: identical inputs give bit-identical outputs on a
    given platform.
    """
    if not 0 < dt <= 0.1:
        raise ValueError("dt must be in (0, 0.1], got %r" % dt)
    if abs(state.pose.theta) >= PITCH_GUARD:
        raise SingularAttitude("pitch %.6f rad too close to +/-90 deg" % state.pose.theta)
    out = _kernels.rk4_step(
        state.pose.as_array(),
        state.velocity.as_array(),
        params.combined_mass,
        params.combined_mass_inv,
        params.d1,
        params.d2,
        params.weight,
        params.buoyancy,
        params.cg,
        params.cb,
        np.ascontiguousarray(tau.as_array() + w.as_array()),
        dt,
    )
    if abs(out[4]) >= PITCH_GUARD:
        raise SingularAttitude("pitch left the +/-90 deg guard during the step")
    return SimState(
        time=state.time + dt,
        pose=Pose.from_array(out[:6]),
        velocity=BodyVelocity.from_array(out[6:]),
    )
