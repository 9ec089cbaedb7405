"""Hot numeric kernels of the 6-DOF integrator.

Everything here works on flat float64 arrays so the functions compile
under numba's nopython mode (see ``_accel``); the same source runs as
plain numpy when the fallback backend is selected.
"""

import numpy as np

from ._accel import jit

_TWO_PI = 2.0 * np.pi


@jit
def wrap_pi(angle):
    """Wrap an angle to [-pi, pi)."""
    return (angle + np.pi) % _TWO_PI - np.pi


@jit
def rotation_matrix(phi, theta, psi):
    """Body-to-earth rotation, Z-Y-X Euler convention."""
    cph = np.cos(phi)
    sph = np.sin(phi)
    cth = np.cos(theta)
    sth = np.sin(theta)
    cps = np.cos(psi)
    sps = np.sin(psi)
    r = np.empty((3, 3))
    r[0, 0] = cps * cth
    r[0, 1] = cps * sth * sph - sps * cph
    r[0, 2] = cps * sth * cph + sps * sph
    r[1, 0] = sps * cth
    r[1, 1] = sps * sth * sph + cps * cph
    r[1, 2] = sps * sth * cph - cps * sph
    r[2, 0] = -sth
    r[2, 1] = cth * sph
    r[2, 2] = cth * cph
    return r


@jit
def euler_rate_matrix(phi, theta):
    """Maps body angular rates (p, q, r) to Euler angle rates."""
    cph = np.cos(phi)
    sph = np.sin(phi)
    cth = np.cos(theta)
    tth = np.tan(theta)
    t = np.empty((3, 3))
    t[0, 0] = 1.0
    t[0, 1] = sph * tth
    t[0, 2] = cph * tth
    t[1, 0] = 0.0
    t[1, 1] = cph
    t[1, 2] = -sph
    t[2, 0] = 0.0
    t[2, 1] = sph / cth
    t[2, 2] = cph / cth
    return t


@jit
def _cross(a, b):
    out = np.empty(3)
    out[0] = a[1] * b[2] - a[2] * b[1]
    out[1] = a[2] * b[0] - a[0] * b[2]
    out[2] = a[0] * b[1] - a[1] * b[0]
    return out


@jit
def coriolis_times_velocity(m_full, vel):
    """C(v) v for the two-block skew parameterization built from M v."""
    v1 = vel[:3]
    v2 = vel[3:]
    a = m_full[:3] @ vel
    b = m_full[3:] @ vel
    out = np.empty(6)
    out[:3] = -_cross(a, v2)
    out[3:] = -_cross(a, v1) - _cross(b, v2)
    return out


@jit
def damping_vector(d1, d2, vel):
    """Diagonal linear-plus-quadratic drag, opposing motion."""
    out = np.empty(6)
    for i in range(6):
        out[i] = -(d1[i] + d2[i] * abs(vel[i])) * vel[i]
    return out


@jit
def restoring_vector(phi, theta, psi, weight, buoyancy, cg, cb):
    """Gravity through cg and buoyancy through cb, in the body frame.

    Returned with the sign of the physical force acting on the hull
    (negative heave component = net lift in the z-down frame).
    """
    r = rotation_matrix(phi, theta, psi)
    # earth z-axis expressed in body frame is the last row of R
    fg = np.empty(3)
    fb = np.empty(3)
    for i in range(3):
        fg[i] = weight * r[2, i]
        fb[i] = -buoyancy * r[2, i]
    out = np.empty(6)
    out[:3] = fg + fb
    out[3:] = _cross(cg, fg) + _cross(cb, fb)
    return out


@jit
def six_dof_derivative(pose, vel, m_full, m_inv, d1, d2, weight, buoyancy, cg, cb, tau):
    """Time derivative of the stacked (pose, body-velocity) state."""
    phi = pose[3]
    theta = pose[4]
    psi = pose[5]
    out = np.empty(12)
    out[:3] = rotation_matrix(phi, theta, psi) @ vel[:3]
    out[3:6] = euler_rate_matrix(phi, theta) @ vel[3:]
    rhs = (
        tau
        + restoring_vector(phi, theta, psi, weight, buoyancy, cg, cb)
        - coriolis_times_velocity(m_full, vel)
        + damping_vector(d1, d2, vel)
    )
    out[6:] = m_inv @ rhs
    return out


@jit
def rk4_step(pose, vel, m_full, m_inv, d1, d2, weight, buoyancy, cg, cb, tau, dt):
    """One classical 4th-order step; returns the new 12-element state."""
    y0 = np.empty(12)
    y0[:6] = pose
    y0[6:] = vel
    k1 = six_dof_derivative(y0[:6], y0[6:], m_full, m_inv, d1, d2, weight, buoyancy, cg, cb, tau)
    y = y0 + 0.5 * dt * k1
    k2 = six_dof_derivative(y[:6], y[6:], m_full, m_inv, d1, d2, weight, buoyancy, cg, cb, tau)
    y = y0 + 0.5 * dt * k2
    k3 = six_dof_derivative(y[:6], y[6:], m_full, m_inv, d1, d2, weight, buoyancy, cg, cb, tau)
    y = y0 + dt * k3
    k4 = six_dof_derivative(y[:6], y[6:], m_full, m_inv, d1, d2, weight, buoyancy, cg, cb, tau)
    out = y0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    out[3] = wrap_pi(out[3])
    out[5] = wrap_pi(out[5])
    return out
