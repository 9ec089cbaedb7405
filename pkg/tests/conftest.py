import numpy as np
import pytest

from auvsim.dynamics import (
    BodyVelocity,
    GeneralizedForce,
    Pose,
    SimState,
    VehicleParams,
    step,
)
from auvsim.params import load_default_params


@pytest.fixture(scope="session")
def default_pset():
    return load_default_params()


@pytest.fixture(scope="session")
def neutral_params():
    """Undamped, neutrally buoyant vehicle with coincident centers."""
    return VehicleParams(
        mass=370.0,
        inertia=np.diag([30.0, 600.0, 600.0]),
        added_mass=np.diag([37.0, 37.0, 37.0, 3.0, 60.0, 60.0]),
        d1=np.zeros(6),
        d2=np.zeros(6),
        weight=3629.7,
        buoyancy=3629.7,
        cg=np.zeros(3),
        cb=np.zeros(3),
    )


@pytest.fixture(scope="session", autouse=True)
def warm_kernels(neutral_params):
    """Trigger numba compilation before any timed test runs."""
    state = SimState(0.0, Pose(), BodyVelocity(u=0.1))
    zero = GeneralizedForce()
    step(neutral_params, state, zero, zero, 0.005)


@pytest.fixture(scope="session")
def calibrated_moment(default_pset):
    from auvsim.trial import calibrate_disturbance

    return calibrate_disturbance(default_pset, kp=5.0, target_sse=8.0)
