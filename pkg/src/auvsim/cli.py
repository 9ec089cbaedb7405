"""Command-line entry point.

Subcommands:
  serve      live simulator with telemetry/command endpoint
  trial      one heading-lock trial, CSV record out
  calibrate  bisect the disturbance moment for a target SSE
  compare    per-gain metrics table and heading traces
  replay     re-run a logged command sequence headlessly
"""

import argparse
import csv
import sys
from pathlib import Path

from .autopilot import PidGains
from .params import ParameterSet, load_default_params, load_params
from .server import TelemetryServer, run_simulation_server
from .sim import Simulation
from .telemetry import decode_command
from .trial import (
    TrialConfig,
    calibrate_disturbance,
    compare_gains,
    compute_metrics,
    linearized_sse,
    run_trial,
)


def _fmt(x) -> str:
    return repr(float(x))


def _load(path) -> ParameterSet:
    return load_params(path) if path else load_default_params()


def _parse_endpoint(text):
    host, _, port = text.rpartition(":")
    return host or "127.0.0.1", int(port)


def _add_params_flag(p):
    p.add_argument("--params", metavar="FILE", default=None,
                   help="vehicle parameter file (default: shipped set)")


def _trial_config(args) -> TrialConfig:
    return TrialConfig(
        cruise_thrust=args.cruise,
        warmup_seconds=args.warmup,
        heading_setpoint=args.setpoint,
        gains=PidGains(args.kp, args.ki, args.kd),
        disturbance_yaw_moment=args.disturbance,
        duration=args.duration,
        error_band=args.band,
    )


def _write_trial_csv(record, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        n = len(record.samples[0].commands) if record.samples else 0
        w.writerow(["t", "yaw", "setpoint", "error"]
                   + ["cmd%d" % (i + 1) for i in range(n)])
        for s in record.samples:
            w.writerow([_fmt(s.t), _fmt(s.yaw), _fmt(s.setpoint), _fmt(s.error)]
                       + [_fmt(c) for c in s.commands])


def _print_metrics(prefix, m):
    print("%ssettling_time=%s" % (prefix, _fmt(m.settling_time)))
    print("%ssteady_state_error=%s" % (prefix, _fmt(m.steady_state_error)))
    print("%sovershoot_count=%d" % (prefix, m.overshoot_count))
    print("%stime_to_band=%s" % (prefix, _fmt(m.time_to_band)))


def cmd_serve(args) -> int:
    pset = _load(args.params)
    host, port = _parse_endpoint(args.listen)
    sim = Simulation(pset, disturbance_yaw=args.disturbance)
    server = TelemetryServer(host, port)
    server.start()
    print("listening on %s:%d" % server.endpoint, flush=True)
    bridge = None
    if args.ws is not None:
        from .wsbridge import WebSocketBridge

        bridge = WebSocketBridge(host, args.ws, server.endpoint)
        bridge.start()
        print("websocket bridge on %s:%d" % bridge.endpoint, flush=True)
    try:
        run_simulation_server(
            sim, server,
            rate_hz=args.rate,
            realtime=args.realtime,
            log_path=args.log,
            duration=args.duration,
        )
    except KeyboardInterrupt:
        pass
    finally:
        server.stop()
        if bridge is not None:
            bridge.stop()
    return 0


def cmd_trial(args) -> int:
    pset = _load(args.params)
    record = run_trial(pset, _trial_config(args))
    if args.out:
        _write_trial_csv(record, args.out)
    _print_metrics("", compute_metrics(record))
    return 0


def cmd_calibrate(args) -> int:
    pset = _load(args.params)
    moment = calibrate_disturbance(pset, kp=args.kp, target_sse=args.target_sse)
    print("disturbance_yaw_moment=%s" % _fmt(moment))
    if moment:
        print("linearized_check_sse=%s" % _fmt(linearized_sse(pset, args.kp, moment)))
    return 0


def cmd_compare(args) -> int:
    pset = _load(args.params)
    gains = [float(v) for v in args.kp_list.split(",")]
    if args.disturbance is None:
        disturbance = calibrate_disturbance(pset, kp=args.calibrate_kp,
                                            target_sse=args.target_sse)
        print("calibrated_disturbance=%s" % _fmt(disturbance))
    else:
        disturbance = args.disturbance
    config = TrialConfig(
        heading_setpoint=args.setpoint,
        disturbance_yaw_moment=disturbance,
        duration=args.duration,
        error_band=args.band,
    )
    report = compare_gains(pset, config, gains)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "metrics.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["kp", "settling_time", "steady_state_error",
                    "overshoot_count", "time_to_band", "time_to_common_band"])
        for r in report.results:
            m = r.metrics
            w.writerow([_fmt(r.kp), _fmt(m.settling_time),
                        _fmt(m.steady_state_error), str(m.overshoot_count),
                        _fmt(m.time_to_band), _fmt(r.time_to_common_band)])
    for r in report.results:
        _write_trial_csv(r.record, out / ("heading_kp%g.csv" % r.kp))
        _print_metrics("kp%g_" % r.kp, r.metrics)
    for (a, b), delta in report.time_to_band_deltas.items():
        print("time_to_band_delta_kp%g_vs_kp%g=%s" % (a, b, _fmt(delta)))
    return 0


def cmd_replay(args) -> int:
    """Apply a logged command sequence at its recorded ticks."""
    pset = _load(args.params)
    sim = Simulation(pset, disturbance_yaw=args.disturbance)
    schedule = []  # (tick, Command)
    with open(args.commands) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            tick_str, _, rest = line.partition(" ")
            schedule.append((int(tick_str), decode_command(rest)))
    schedule.sort(key=lambda item: item[0])

    from .server import run_simulation_server as _run

    class _Feeder:
        """Stands in for a TelemetryServer, feeding the scheduled commands."""

        def drain_commands(self):
            out = []
            while schedule and schedule[0][0] <= sim.tick_index:
                out.append((self, schedule.pop(0)[1]))
            return out

        def broadcast(self, data):
            pass

        def send(self, data):
            return True

    _run(sim, _Feeder(), rate_hz=args.rate, realtime=False,
         log_path=args.out, duration=args.duration)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="auvsim")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("serve", help="run the live simulator and telemetry endpoint")
    _add_params_flag(s)
    s.add_argument("--listen", default="127.0.0.1:9500", metavar="HOST:PORT")
    s.add_argument("--rate", type=float, default=35.0, help="telemetry rate, Hz")
    s.add_argument("--realtime", action="store_true",
                   help="throttle to wall-clock time for live piloting")
    s.add_argument("--ws", type=int, default=None, metavar="PORT",
                   help="also expose a WebSocket bridge for browser stations")
    s.add_argument("--log", default="telemetry_log.csv", metavar="CSV")
    s.add_argument("--duration", type=float, default=None,
                   help="stop after this much simulated time, s")
    s.add_argument("--disturbance", type=float, default=0.0,
                   help="constant yaw disturbance moment, N*m")
    s.set_defaults(func=cmd_serve)

    t = sub.add_parser("trial", help="run one heading-lock trial")
    _add_params_flag(t)
    t.add_argument("--kp", type=float, default=5.0)
    t.add_argument("--ki", type=float, default=0.0)
    t.add_argument("--kd", type=float, default=0.0)
    t.add_argument("--setpoint", type=float, default=60.0, metavar="DEG")
    t.add_argument("--cruise", type=float, default=0.30, metavar="PCT")
    t.add_argument("--duration", type=float, default=60.0, metavar="S")
    t.add_argument("--warmup", type=float, default=2.0, metavar="S")
    t.add_argument("--band", type=float, default=2.0, metavar="DEG")
    t.add_argument("--disturbance", type=float, default=0.0, metavar="NM")
    t.add_argument("--out", default=None, metavar="CSV")
    t.set_defaults(func=cmd_trial)

    c = sub.add_parser("calibrate", help="find the disturbance for a target SSE")
    _add_params_flag(c)
    c.add_argument("--target-sse", type=float, default=8.0, metavar="DEG")
    c.add_argument("--kp", type=float, default=5.0)
    c.set_defaults(func=cmd_calibrate)

    g = sub.add_parser("compare", help="compare gains under one disturbance")
    _add_params_flag(g)
    g.add_argument("--kp-list", default="5,10", metavar="K1,K2,...")
    g.add_argument("--disturbance", type=float, default=None, metavar="NM",
                   help="yaw moment; omitted = calibrate first")
    g.add_argument("--calibrate-kp", type=float, default=5.0)
    g.add_argument("--target-sse", type=float, default=8.0)
    g.add_argument("--setpoint", type=float, default=60.0)
    g.add_argument("--duration", type=float, default=60.0)
    g.add_argument("--band", type=float, default=2.0)
    g.add_argument("--out", default="compare_out", metavar="DIR")
    g.set_defaults(func=cmd_compare)

    r = sub.add_parser("replay", help="replay a logged command sequence")
    _add_params_flag(r)
    r.add_argument("--commands", required=True, metavar="FILE",
                   help="lines of '<tick> <command record>'")
    r.add_argument("--duration", type=float, required=True)
    r.add_argument("--rate", type=float, default=35.0)
    r.add_argument("--disturbance", type=float, default=0.0)
    r.add_argument("--out", required=True, metavar="CSV")
    r.set_defaults(func=cmd_replay)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except KeyboardInterrupt:
        return 130
    except Exception as exc:
        print("error: %s: %s" % (type(exc).__name__, exc), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
