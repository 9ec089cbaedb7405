"""Wire format for telemetry frames and operator commands.

One newline-terminated UTF-8 record per frame or command. Frame records
start with ``FRAME`` and carry key=value fields in a fixed order;
command records start with the variant name. Floats are encoded with
repr so that encode -> decode -> encode is byte-identical.
"""

import csv
import io
from dataclasses import dataclass
from typing import Optional, Union


class ProtocolError(Exception):
    pass


class MalformedCommand(ProtocolError):
    pass


class RangeViolation(ProtocolError):
    pass


class StaleSequence(ProtocolError):
    pass


def _fmt(x: float) -> str:
    return repr(float(x))


@dataclass(frozen=True)
class TelemetryFrame:
    timestamp_ms: int
    roll: float        # deg, [-180, 180)
    pitch: float       # deg, [-180, 180)
    yaw: float         # deg, [0, 360)
    depth: float       # m
    altitude: float    # m above lakebed
    obstacle: float    # m, -1 = none
    rpm: tuple         # 3 ints
    leak: tuple        # 8 bools
    voltage: float

    def __post_init__(self):
        if not 0 <= self.yaw < 360:
            raise ValueError("yaw must be in [0, 360)")
        if not -180 <= self.roll < 180 or not -180 <= self.pitch < 180:
            raise ValueError("roll/pitch must be in [-180, 180)")
        if len(self.rpm) != 3 or len(self.leak) != 8:
            raise ValueError("expected 3 rpm channels and 8 leak channels")


CSV_HEADER = [
    "timestamp_ms", "roll", "pitch", "yaw", "depth", "altitude", "obstacle",
    "rpm1", "rpm2", "rpm3",
    "leak1", "leak2", "leak3", "leak4", "leak5", "leak6", "leak7", "leak8",
    "voltage",
]


def encode_frame(f: TelemetryFrame) -> bytes:
    parts = [
        "FRAME",
        "timestamp_ms=%d" % f.timestamp_ms,
        "roll=" + _fmt(f.roll),
        "pitch=" + _fmt(f.pitch),
        "yaw=" + _fmt(f.yaw),
        "depth=" + _fmt(f.depth),
        "altitude=" + _fmt(f.altitude),
        "obstacle=" + _fmt(f.obstacle),
        "rpm=%d,%d,%d" % tuple(int(r) for r in f.rpm),
        "leak=" + ",".join("1" if b else "0" for b in f.leak),
        "voltage=" + _fmt(f.voltage),
    ]
    return (" ".join(parts) + "\n").encode("utf-8")


def _fields(tokens, expected_keys, record_kind):
    got = {}
    for tok in tokens:
        if "=" not in tok:
            raise MalformedCommand("%s: bad field %r" % (record_kind, tok))
        key, _, val = tok.partition("=")
        if key in got:
            raise MalformedCommand("%s: duplicate field %r" % (record_kind, key))
        got[key] = val
    if set(got) != set(expected_keys):
        raise MalformedCommand(
            "%s: expected fields %s" % (record_kind, ",".join(expected_keys))
        )
    return got


def decode_frame(line) -> TelemetryFrame:
    if isinstance(line, bytes):
        line = line.decode("utf-8")
    tokens = line.strip().split(" ")
    if not tokens or tokens[0] != "FRAME":
        raise MalformedCommand("not a frame record")
    keys = ["timestamp_ms", "roll", "pitch", "yaw", "depth", "altitude",
            "obstacle", "rpm", "leak", "voltage"]
    got = _fields(tokens[1:], keys, "frame")
    try:
        return TelemetryFrame(
            timestamp_ms=int(got["timestamp_ms"]),
            roll=float(got["roll"]),
            pitch=float(got["pitch"]),
            yaw=float(got["yaw"]),
            depth=float(got["depth"]),
            altitude=float(got["altitude"]),
            obstacle=float(got["obstacle"]),
            rpm=tuple(int(v) for v in got["rpm"].split(",")),
            leak=tuple(v == "1" for v in got["leak"].split(",")),
            voltage=float(got["voltage"]),
        )
    except ValueError as exc:
        raise MalformedCommand("frame: %s" % exc)


def frame_to_csv_row(f: TelemetryFrame) -> list:
    return (
        [str(f.timestamp_ms), _fmt(f.roll), _fmt(f.pitch), _fmt(f.yaw),
         _fmt(f.depth), _fmt(f.altitude), _fmt(f.obstacle)]
        + ["%d" % r for r in f.rpm]
        + ["1" if b else "0" for b in f.leak]
        + [_fmt(f.voltage)]
    )


# ---------------------------------------------------------------------------
# Operator commands


@dataclass(frozen=True)
class SetManualThrust:
    seq: int
    thrust: tuple  # 3 normalized values


@dataclass(frozen=True)
class Engage:
    seq: int
    setpoint: float
    kp: float
    ki: float
    kd: float


@dataclass(frozen=True)
class Disengage:
    seq: int


@dataclass(frozen=True)
class SetGains:
    seq: int
    kp: float
    ki: float
    kd: float


@dataclass(frozen=True)
class SetCruiseThrust:
    seq: int
    value: float


Command = Union[SetManualThrust, Engage, Disengage, SetGains, SetCruiseThrust]

_VARIANTS = {
    "SetManualThrust": (SetManualThrust, ["seq", "t"]),
    "Engage": (Engage, ["seq", "setpoint", "kp", "ki", "kd"]),
    "Disengage": (Disengage, ["seq"]),
    "SetGains": (SetGains, ["seq", "kp", "ki", "kd"]),
    "SetCruiseThrust": (SetCruiseThrust, ["seq", "value"]),
}


def encode_command(cmd: Command) -> bytes:
    if isinstance(cmd, SetManualThrust):
        body = "SetManualThrust seq=%d t=%s" % (
            cmd.seq, ",".join(_fmt(v) for v in cmd.thrust))
    elif isinstance(cmd, Engage):
        body = "Engage seq=%d setpoint=%s kp=%s ki=%s kd=%s" % (
            cmd.seq, _fmt(cmd.setpoint), _fmt(cmd.kp), _fmt(cmd.ki), _fmt(cmd.kd))
    elif isinstance(cmd, Disengage):
        body = "Disengage seq=%d" % cmd.seq
    elif isinstance(cmd, SetGains):
        body = "SetGains seq=%d kp=%s ki=%s kd=%s" % (
            cmd.seq, _fmt(cmd.kp), _fmt(cmd.ki), _fmt(cmd.kd))
    elif isinstance(cmd, SetCruiseThrust):
        body = "SetCruiseThrust seq=%d value=%s" % (cmd.seq, _fmt(cmd.value))
    else:
        raise TypeError("not a command: %r" % (cmd,))
    return (body + "\n").encode("utf-8")


def _check_gains(kp, ki, kd):
    if kp < 0 or ki < 0 or kd < 0:
        raise RangeViolation("gains must be nonnegative")


def decode_command(line, last_seq: Optional[int] = None) -> Command:
    """Parse one command record; unknown variants are rejected.

    When last_seq is given, sequence numbers must be strictly
    increasing per connection.
    """
    if isinstance(line, bytes):
        try:
            line = line.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedCommand(str(exc))
    tokens = line.strip().split(" ")
    if not tokens or not tokens[0]:
        raise MalformedCommand("empty record")
    name = tokens[0]
    if name not in _VARIANTS:
        raise MalformedCommand("unknown command variant %r" % name)
    cls, keys = _VARIANTS[name]
    got = _fields(tokens[1:], keys, name)
    try:
        seq = int(got["seq"])
    except ValueError:
        raise MalformedCommand("%s: bad seq %r" % (name, got["seq"]))
    if last_seq is not None and seq <= last_seq:
        raise StaleSequence("seq %d <= last seen %d" % (seq, last_seq))

    try:
        if cls is SetManualThrust:
            thrust = tuple(float(v) for v in got["t"].split(","))
            if len(thrust) != 3:
                raise MalformedCommand("SetManualThrust: expected 3 values")
            if any(abs(v) > 1 for v in thrust):
                raise RangeViolation("thrust outside [-1, 1]")
            return SetManualThrust(seq, thrust)
        if cls is Engage:
            setpoint = float(got["setpoint"])
            kp, ki, kd = (float(got[k]) for k in ("kp", "ki", "kd"))
            if not 0 <= setpoint < 360:
                raise RangeViolation("setpoint outside [0, 360)")
            _check_gains(kp, ki, kd)
            return Engage(seq, setpoint, kp, ki, kd)
        if cls is Disengage:
            return Disengage(seq)
        if cls is SetGains:
            kp, ki, kd = (float(got[k]) for k in ("kp", "ki", "kd"))
            _check_gains(kp, ki, kd)
            return SetGains(seq, kp, ki, kd)
        value = float(got["value"])
        if not 0 <= value <= 1:
            raise RangeViolation("cruise thrust outside [0, 1]")
        return SetCruiseThrust(seq, value)
    except ValueError as exc:
        raise MalformedCommand("%s: %s" % (name, exc))


class FrameLog:
    """CSV log of every published frame, in publish order."""

    def __init__(self, path):
        self._fh = open(path, "w", newline="")
        self._writer = csv.writer(self._fh)
        self._writer.writerow(CSV_HEADER)

    def append(self, frame: TelemetryFrame):
        self._writer.writerow(frame_to_csv_row(frame))

    def close(self):
        self._fh.close()


def frames_to_csv_text(frames) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(CSV_HEADER)
    for f in frames:
        w.writerow(frame_to_csv_row(f))
    return buf.getvalue()
