import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from auvsim.actuation import (
    AllocationMatrix,
    CommandOutOfRange,
    ControlVector,
    DimensionMismatch,
    ThrusterParams,
    ThrusterState,
    allocate,
    default_allocation,
    steady_thrust,
    surge_budget,
    thruster_step,
    validate_surge_budget,
)

P = ThrusterParams()


class TestSteadyThrust:
    def test_dead_zone_is_flat(self):
        for cmd in (0.0, 0.01, -0.03, 0.05, -0.05, 0.049):
            assert steady_thrust(P, cmd) == 0.0

    def test_full_command_is_bollard(self):
        assert steady_thrust(P, 1.0) == pytest.approx(300.0)
        assert steady_thrust(P, -1.0) == pytest.approx(-300.0)

    def test_power_law_midpoint(self):
        # halfway through the active range: (0.5)^2 of bollard
        cmd = P.dead_zone + 0.5 * (1 - P.dead_zone)
        assert steady_thrust(P, cmd) == pytest.approx(75.0)

    def test_continuous_at_dead_zone_edge(self):
        eps = 1e-9
        assert abs(steady_thrust(P, P.dead_zone + eps)) < 1e-6

    @given(st.floats(-1.0, 1.0))
    def test_odd_symmetry(self, cmd):
        assert steady_thrust(P, -cmd) == -steady_thrust(P, cmd)

    def test_monotone_nondecreasing(self):
        grid = np.linspace(-1, 1, 2001)
        vals = [steady_thrust(P, c) for c in grid]
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_out_of_range_rejected(self):
        for bad in (1.0001, -2.0, math.nan, math.inf):
            with pytest.raises(CommandOutOfRange):
                steady_thrust(P, bad)

    def test_param_validation(self):
        with pytest.raises(ValueError):
            ThrusterParams(max_thrust=0.0)
        with pytest.raises(ValueError):
            ThrusterParams(dead_zone=1.0)
        with pytest.raises(ValueError):
            ThrusterParams(time_constant=0.0)
        with pytest.raises(ValueError):
            ThrusterParams(curve_exponent=0.5)


class TestThrusterLag:
    def run_steps(self, cmd, t_end, dt=0.005):
        state = ThrusterState()
        for _ in range(round(t_end / dt)):
            state = thruster_step(state, P, cmd, dt)
        return state

    def test_63_percent_at_one_time_constant(self):
        state = self.run_steps(1.0, P.time_constant)
        assert state.thrust == pytest.approx(300.0 * (1 - math.exp(-1)), rel=1e-9)
        assert state.thrust / 300.0 == pytest.approx(0.632, abs=1e-3)

    def test_converged_after_five_time_constants(self):
        # residual of a first-order lag at 5 tau is e^-5 of the step size;
        # from a 30 % cruise step that is under 0.1 % of bollard thrust
        state = self.run_steps(0.3, 5 * P.time_constant)
        target = steady_thrust(P, 0.3)
        assert abs(state.thrust - target) == pytest.approx(
            abs(target) * math.exp(-5), rel=1e-6
        )
        assert abs(state.thrust - target) < 1e-3 * P.max_thrust

    def test_never_exceeds_bollard(self):
        rng = np.random.default_rng(3)
        state = ThrusterState()
        for _ in range(2000):
            state = thruster_step(state, P, rng.uniform(-1, 1), 0.005)
            assert abs(state.thrust) <= P.max_thrust

    def test_rpm_tracks_thrust(self):
        state = self.run_steps(1.0, 10 * P.time_constant)
        assert state.rpm == pytest.approx(P.max_rpm, rel=1e-3)
        state = self.run_steps(-1.0, 10 * P.time_constant)
        assert state.rpm == pytest.approx(-P.max_rpm, rel=1e-3)

    def test_dt_validation(self):
        with pytest.raises(ValueError):
            thruster_step(ThrusterState(), P, 0.5, 0.0)


class TestAllocation:
    def test_default_geometry(self):
        b = default_allocation()
        assert b.n_thrusters == 3
        np.testing.assert_allclose(b.entries[0], [1, 1, 1])
        np.testing.assert_allclose(b.entries[5], [0, 0.4, -0.4])

    def test_full_forward_surge(self):
        tau = allocate(default_allocation(), ControlVector((300.0, 300.0, 300.0)))
        assert tau.fx == pytest.approx(900.0)
        assert tau.mz == pytest.approx(0.0, abs=1e-9)

    def test_differential_yaw_moment(self):
        tau = allocate(default_allocation(), [0.0, 150.0, -150.0])
        assert tau.mz == pytest.approx(2 * 150.0 * 0.4)
        assert tau.fx == pytest.approx(0.0, abs=1e-9)

    def test_linearity(self):
        rng = np.random.default_rng(5)
        b = default_allocation()
        for _ in range(100):
            u1, u2 = rng.uniform(-300, 300, (2, 3))
            lhs = allocate(b, u1 + u2).as_array()
            rhs = allocate(b, u1).as_array() + allocate(b, u2).as_array()
            assert np.abs(lhs - rhs).max() < 1e-9

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            allocate(default_allocation(), [100.0, 100.0])

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            AllocationMatrix(np.ones((5, 3)))

    def test_surge_budget(self):
        b = default_allocation()
        assert surge_budget(b, 300.0) == pytest.approx(900.0)
        validate_surge_budget(b, 300.0)  # at the cap: allowed
        with pytest.raises(ValueError):
            validate_surge_budget(b, 301.0)
