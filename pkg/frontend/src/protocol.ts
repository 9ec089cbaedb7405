/**
 * Wire protocol shared with the simulator: newline-delimited UTF-8
 * records. `FRAME key=value ...` telemetry with fields in a fixed
 * order, command records starting with the variant name, and `OK`/`ERR`
 * acknowledgment lines. Kept dependency-free so it runs unchanged in
 * the browser and under node in tests.
 */

export interface TelemetryFrame {
  timestampMs: number;
  roll: number; // deg [-180, 180)
  pitch: number; // deg [-180, 180)
  yaw: number; // deg [0, 360)
  depth: number; // m
  altitude: number; // m above lakebed
  obstacle: number; // m, -1 = none
  rpm: [number, number, number];
  leak: boolean[]; // 8 channels
  voltage: number;
}

export type Command =
  | { kind: "SetManualThrust"; seq: number; thrust: [number, number, number] }
  | { kind: "Engage"; seq: number; setpoint: number; kp: number; ki: number; kd: number }
  | { kind: "Disengage"; seq: number }
  | { kind: "SetGains"; seq: number; kp: number; ki: number; kd: number }
  | { kind: "SetCruiseThrust"; seq: number; value: number };

export type Ack =
  | { kind: "ok"; seq: number; tick: number }
  | { kind: "err"; error: string; message: string };

export class ProtocolError extends Error {}

const FRAME_KEYS = [
  "timestamp_ms",
  "roll",
  "pitch",
  "yaw",
  "depth",
  "altitude",
  "obstacle",
  "rpm",
  "leak",
  "voltage",
] as const;

function parseFields(tokens: string[], keys: readonly string[], kind: string): Map<string, string> {
  const got = new Map<string, string>();
  for (const tok of tokens) {
    const i = tok.indexOf("=");
    if (i < 0) throw new ProtocolError(`${kind}: bad field ${JSON.stringify(tok)}`);
    const key = tok.slice(0, i);
    if (got.has(key)) throw new ProtocolError(`${kind}: duplicate field ${key}`);
    got.set(key, tok.slice(i + 1));
  }
  if (got.size !== keys.length || keys.some((k) => !got.has(k))) {
    throw new ProtocolError(`${kind}: expected fields ${keys.join(",")}`);
  }
  return got;
}

function num(text: string, kind: string): number {
  const v = Number(text);
  if (!Number.isFinite(v) || text.trim() === "") {
    throw new ProtocolError(`${kind}: bad number ${JSON.stringify(text)}`);
  }
  return v;
}

export function parseFrame(line: string): TelemetryFrame {
  const tokens = line.trim().split(" ");
  if (tokens[0] !== "FRAME") throw new ProtocolError("not a frame record");
  const f = parseFields(tokens.slice(1), FRAME_KEYS, "frame");
  const rpm = f.get("rpm")!.split(",").map((v) => num(v, "frame"));
  const leak = f.get("leak")!.split(",").map((v) => v === "1");
  if (rpm.length !== 3 || leak.length !== 8) {
    throw new ProtocolError("frame: expected 3 rpm and 8 leak channels");
  }
  return {
    timestampMs: num(f.get("timestamp_ms")!, "frame"),
    roll: num(f.get("roll")!, "frame"),
    pitch: num(f.get("pitch")!, "frame"),
    yaw: num(f.get("yaw")!, "frame"),
    depth: num(f.get("depth")!, "frame"),
    altitude: num(f.get("altitude")!, "frame"),
    obstacle: num(f.get("obstacle")!, "frame"),
    rpm: rpm as [number, number, number],
    leak,
    voltage: num(f.get("voltage")!, "frame"),
  };
}

/** Format a number the way the simulator does (shortest round trip). */
function fmt(x: number): string {
  if (Number.isInteger(x) && Math.abs(x) < 1e16) return `${x}.0`;
  return String(x);
}

export function encodeCommand(cmd: Command): string {
  switch (cmd.kind) {
    case "SetManualThrust":
      return `SetManualThrust seq=${cmd.seq} t=${cmd.thrust.map(fmt).join(",")}`;
    case "Engage":
      return (
        `Engage seq=${cmd.seq} setpoint=${fmt(cmd.setpoint)} ` +
        `kp=${fmt(cmd.kp)} ki=${fmt(cmd.ki)} kd=${fmt(cmd.kd)}`
      );
    case "Disengage":
      return `Disengage seq=${cmd.seq}`;
    case "SetGains":
      return `SetGains seq=${cmd.seq} kp=${fmt(cmd.kp)} ki=${fmt(cmd.ki)} kd=${fmt(cmd.kd)}`;
    case "SetCruiseThrust":
      return `SetCruiseThrust seq=${cmd.seq} value=${fmt(cmd.value)}`;
  }
}

/** Client-side range validation, mirroring the simulator's checks. */
export function validateCommand(cmd: Command): string | null {
  const gainsOk = (kp: number, ki: number, kd: number) =>
    kp >= 0 && ki >= 0 && kd >= 0 ? null : "gains must be nonnegative";
  switch (cmd.kind) {
    case "SetManualThrust":
      return cmd.thrust.every((v) => Math.abs(v) <= 1)
        ? null
        : "thrust outside [-1, 1]";
    case "Engage":
      if (cmd.setpoint < 0 || cmd.setpoint >= 360) return "setpoint outside [0, 360)";
      return gainsOk(cmd.kp, cmd.ki, cmd.kd);
    case "SetGains":
      return gainsOk(cmd.kp, cmd.ki, cmd.kd);
    case "SetCruiseThrust":
      return cmd.value >= 0 && cmd.value <= 1 ? null : "cruise thrust outside [0, 1]";
    case "Disengage":
      return null;
  }
}

export function parseAck(line: string): Ack | null {
  const tokens = line.trim().split(" ");
  if (tokens[0] === "OK") {
    const f = parseFields(tokens.slice(1), ["seq", "tick"], "ack");
    return { kind: "ok", seq: num(f.get("seq")!, "ack"), tick: num(f.get("tick")!, "ack") };
  }
  if (tokens[0] === "ERR") {
    return {
      kind: "err",
      error: tokens[1] ?? "Unknown",
      message: tokens.slice(2).join(" "),
    };
  }
  return null;
}

export type Inbound =
  | { kind: "frame"; frame: TelemetryFrame }
  | { kind: "ack"; ack: Ack }
  | { kind: "unknown"; line: string };

/** Classify one inbound line from the simulator. */
export function parseLine(line: string): Inbound {
  if (line.startsWith("FRAME")) return { kind: "frame", frame: parseFrame(line) };
  const ack = parseAck(line);
  if (ack) return { kind: "ack", ack };
  return { kind: "unknown", line };
}
