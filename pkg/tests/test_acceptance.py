"""End-to-end acceptance checks, one criterion per test.

Each test finishes by printing a single PASS line (run with ``-s`` or
read captured output) so the suite doubles as a checklist.
"""

import math
import time

import numpy as np
import pytest

from auvsim.autopilot import PidGains
from auvsim.cli import main as cli_main
from auvsim.dynamics import (
    BodyVelocity,
    GeneralizedForce,
    Pose,
    SimState,
    coriolis_matrix,
    step,
)
from auvsim.server import TelemetryServer, run_simulation_server
from auvsim.sim import Simulation
from auvsim.telemetry import (
    Disengage,
    Engage,
    SetCruiseThrust,
    SetGains,
    SetManualThrust,
    TelemetryFrame,
    decode_command,
    decode_frame,
    encode_command,
    encode_frame,
)
from auvsim.trial import TrialConfig, compare_gains, compute_metrics, run_trial

ZERO = GeneralizedForce()


def test_criterion_1_conservation_suite(neutral_params):
    start = time.perf_counter()
    rng = np.random.default_rng(42)
    worst_drift = 0.0
    for _ in range(3):
        v0 = np.concatenate(
            [rng.uniform(-1, 1, 3), rng.uniform(-0.05, 0.05, 2),
             rng.uniform(-0.5, 0.5, 1)]
        )
        s = SimState(0.0, Pose(), BodyVelocity(*v0))
        e0 = 0.5 * v0 @ neutral_params.combined_mass @ v0
        for _ in range(2000):  # 10 s at dt = 5 ms
            s = step(neutral_params, s, ZERO, ZERO, 0.005)
        v = s.velocity.as_array()
        drift = abs(0.5 * v @ neutral_params.combined_mass @ v - e0) / e0
        worst_drift = max(worst_drift, drift)
        assert drift < 1e-6

    worst_power = 0.0
    for _ in range(1000):
        a = rng.normal(size=(6, 6))
        m = 100.0 * (a @ a.T / 6.0 + np.eye(6))
        v = rng.uniform(-1, 1, 6)
        power = abs(v @ coriolis_matrix(m, BodyVelocity(*v)) @ v)
        worst_power = max(worst_power, power)
        assert power < 1e-12

    elapsed = time.perf_counter() - start
    assert elapsed < 10.0
    print(
        "PASS criterion 1: energy drift %.2e, |v'Cv| %.2e, %.1f s"
        % (worst_drift, worst_power, elapsed)
    )


def test_criterion_2_surge_analytic_oracle():
    from auvsim.dynamics import VehicleParams

    p = VehicleParams(
        mass=463.0,
        inertia=np.diag([30.0, 600.0, 600.0]),
        added_mass=np.diag([37.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
        d1=np.array([50.0, 0, 0, 0, 0, 0]),
        d2=np.zeros(6),
        weight=3629.7,
        buoyancy=3629.7,
        cg=np.zeros(3),
        cb=np.zeros(3),
    )
    s = SimState(0.0, Pose(), BodyVelocity(u=2.0))
    for _ in range(2000):
        s = step(p, s, ZERO, ZERO, 0.005)
    exact = 2.0 * math.exp(-50.0 / 500.0 * 10.0)
    rel = abs(s.velocity.u - exact) / exact
    assert rel < 1e-6
    print("PASS criterion 2: surge decay relative error %.2e at t=10 s" % rel)


def test_criterion_3_calibrated_sse(default_pset, calibrated_moment):
    sse = {}
    for kp in (5.0, 10.0):
        cfg = TrialConfig(
            gains=PidGains(kp), disturbance_yaw_moment=calibrated_moment
        )
        t0 = time.perf_counter()
        rec = run_trial(default_pset, cfg)
        elapsed = time.perf_counter() - t0
        assert elapsed < 30.0  # 60 s trial, faster than real time
        sse[kp] = compute_metrics(rec).steady_state_error
    assert sse[5.0] == pytest.approx(8.0, abs=0.5)
    assert sse[10.0] == pytest.approx(4.0, abs=1.0)
    print(
        "PASS criterion 3: disturbance %.2f N*m gives SSE %.2f deg at kp=5, "
        "%.2f deg at kp=10" % (calibrated_moment, sse[5.0], sse[10.0])
    )


def test_criterion_4_gain_ordering(default_pset, calibrated_moment):
    cfg = TrialConfig(disturbance_yaw_moment=calibrated_moment)
    report = compare_gains(default_pset, cfg, [5.0, 10.0])
    slow = report.row(5.0)
    fast = report.row(10.0)
    assert fast.time_to_common_band < slow.time_to_common_band
    delta = report.time_to_band_deltas[(5.0, 10.0)]
    assert delta > 0.0
    assert slow.metrics.overshoot_count == 0
    assert fast.metrics.overshoot_count >= 1
    print(
        "PASS criterion 4: kp=10 reaches the %.2f deg band %.2f s before kp=5 "
        "(overshoots: kp5=%d, kp10=%d)"
        % (report.common_band, delta, slow.metrics.overshoot_count,
           fast.metrics.overshoot_count)
    )


def test_criterion_5_actuation_limits(default_pset):
    from auvsim.actuation import ThrusterState, steady_thrust, thruster_step

    tp = default_pset.thruster
    b = default_pset.allocation
    rng = np.random.default_rng(99)
    for _ in range(50):
        states = [ThrusterState() for _ in range(b.n_thrusters)]
        for _ in range(200):
            cmds = rng.uniform(-1, 1, b.n_thrusters)
            states = [
                thruster_step(s, tp, c, 0.005) for s, c in zip(states, cmds)
            ]
            thrusts = np.array([s.thrust for s in states])
            assert np.all(np.abs(thrusts) <= 300.0 + 1e-9)
            surge = float(b.entries[0] @ thrusts)
            assert surge <= 900.0 + 1e-9
    for cmd in np.linspace(-tp.dead_zone, tp.dead_zone, 101):
        assert steady_thrust(tp, cmd) == 0.0
    print(
        "PASS criterion 5: 10k fuzzed steps kept |thrust| <= 300 N and "
        "surge <= 900 N; dead zone exactly flat"
    )


def test_criterion_6_protocol_suite(default_pset, tmp_path):
    # 1e4 fuzzed frames: encode -> decode -> encode identity
    rng = np.random.default_rng(7)
    for _ in range(10_000):
        frame = TelemetryFrame(
            timestamp_ms=int(rng.integers(0, 2**40)),
            roll=float(rng.uniform(-180, 179.999)),
            pitch=float(rng.uniform(-180, 179.999)),
            yaw=float(rng.uniform(0, 359.999)),
            depth=float(rng.normal(0, 100)),
            altitude=float(rng.normal(0, 100)),
            obstacle=float(rng.normal(0, 100)),
            rpm=tuple(int(v) for v in rng.integers(-3000, 3000, 3)),
            leak=tuple(bool(v) for v in rng.integers(0, 2, 8)),
            voltage=float(rng.normal(150, 10)),
        )
        wire = encode_frame(frame)
        assert decode_frame(wire) == frame
        assert encode_frame(decode_frame(wire)) == wire
    for cmd in (
        SetManualThrust(1, (0.3, -0.2, 0.1)),
        Engage(2, 120.0, 5.0, 0.1, 0.5),
        Disengage(3),
        SetGains(4, 10.0, 0.0, 0.0),
        SetCruiseThrust(5, 0.3),
    ):
        assert decode_command(encode_command(cmd)) == cmd

    # 10 s at 35 Hz with two live subscribers
    import socket

    server = TelemetryServer(port=0)
    server.start()
    try:
        socks = [socket.create_connection(server.endpoint, timeout=5.0)
                 for _ in range(2)]
        deadline = time.monotonic() + 5.0
        while server.client_count() < 2 and time.monotonic() < deadline:
            time.sleep(0.005)
        log = tmp_path / "telemetry.csv"
        sim = Simulation(default_pset)
        sim.set_manual_thrust((0.3, 0.3, 0.3))
        n = run_simulation_server(sim, server, rate_hz=35.0, duration=10.0,
                                  log_path=log)
    finally:
        server.stop()
    assert abs(n - 350) <= 1
    rows = log.read_text().strip().splitlines()
    assert abs((len(rows) - 1) - 350) <= 1

    streams = []
    for sock in socks:
        buf = b""
        sock.settimeout(5.0)
        try:
            while True:
                chunk = sock.recv(65536)
                if not chunk:
                    break
                buf += chunk
        except OSError:
            pass
        streams.append([l for l in buf.decode().splitlines()
                        if l.startswith("FRAME")])
    assert streams[0] == streams[1]
    assert abs(len(streams[0]) - 350) <= 1
    print(
        "PASS criterion 6: 10k frame round trips, all command variants, "
        "%d frames logged in 10 s, both subscribers identical" % (len(rows) - 1)
    )


def test_criterion_7_trial_determinism(default_pset, calibrated_moment, tmp_path):
    out = [tmp_path / "a.csv", tmp_path / "b.csv"]
    flags = [
        "trial", "--kp", "5", "--duration", "20",
        "--disturbance", repr(calibrated_moment),
    ]
    for path in out:
        assert cli_main(flags + ["--out", str(path)]) == 0
    a, b = out[0].read_bytes(), out[1].read_bytes()
    assert a == b
    print(
        "PASS criterion 7: repeated trial runs wrote byte-identical CSV "
        "(%d bytes)" % len(a)
    )
