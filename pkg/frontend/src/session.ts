/**
 * Station-side session state. Everything displayed by the console
 * traces to a received frame, and every vehicle change traces to a
 * command logged here: the session never fabricates telemetry.
 */

import {
  Ack,
  Command,
  TelemetryFrame,
  encodeCommand,
  parseLine,
  validateCommand,
} from "./protocol.js";
import { LineTransport, TransportFactory } from "./transport.js";

export type ConnectionState = "connected" | "reconnecting" | "closed";

/** A command as built by the UI, before a sequence number is assigned. */
export type CommandInput = Command extends infer C
  ? C extends { seq: number }
    ? Omit<C, "seq">
    : never
  : never;

export interface HeadingSample {
  t: number; // s, frame clock
  yaw: number; // deg
  setpoint: number | null; // deg, null while in manual mode
}

export interface CommandLogEntry {
  seq: number;
  line: string;
  status: "sent" | "acked" | "rejected" | "blocked";
  tick?: number; // simulator tick the command took effect before
  error?: string;
}

/** Fixed-capacity ring; push evicts the oldest sample. */
export class RingBuffer<T> {
  private items: T[] = [];
  private start = 0;

  constructor(readonly capacity: number) {
    if (capacity < 1) throw new Error("capacity must be >= 1");
  }

  get length(): number {
    return this.items.length;
  }

  push(item: T): void {
    if (this.items.length < this.capacity) {
      this.items.push(item);
    } else {
      this.items[this.start] = item;
      this.start = (this.start + 1) % this.capacity;
    }
  }

  toArray(): T[] {
    return this.items.slice(this.start).concat(this.items.slice(0, this.start));
  }

  last(): T | undefined {
    if (this.items.length === 0) return undefined;
    const i = (this.start + this.items.length - 1) % this.items.length;
    return this.items[i];
  }
}

export interface SessionOptions {
  /** >= 2 minutes at 35 Hz by default. */
  historyCapacity?: number;
  /** Reconnect backoff schedule; the last entry repeats. */
  reconnectDelaysMs?: number[];
  onFrame?: (frame: TelemetryFrame) => void;
  onStateChange?: (state: ConnectionState) => void;
  onCommandLog?: (entry: CommandLogEntry) => void;
}

export class StationSession {
  connectionState: ConnectionState = "reconnecting";
  lastFrame: TelemetryFrame | null = null;
  commandSeq = 0;
  readonly headingHistory: RingBuffer<HeadingSample>;
  readonly commandLog: CommandLogEntry[] = [];

  /** Setpoint as last commanded; drawn on the heading plot. */
  private setpoint: number | null = null;
  private transport: LineTransport | null = null;
  private reconnectAttempt = 0;
  private reconnectTimer: ReturnType<typeof setTimeout> | null = null;
  private readonly delays: number[];

  constructor(
    private readonly factory: TransportFactory,
    private readonly opts: SessionOptions = {},
  ) {
    this.headingHistory = new RingBuffer(opts.historyCapacity ?? 35 * 120);
    this.delays = opts.reconnectDelaysMs ?? [250, 500, 1000, 2000, 5000];
    this.open();
  }

  get currentSetpoint(): number | null {
    return this.setpoint;
  }

  private setState(state: ConnectionState): void {
    if (this.connectionState === state) return;
    this.connectionState = state;
    this.opts.onStateChange?.(state);
  }

  private open(): void {
    const transport = this.factory();
    this.transport = transport;
    transport.onOpen = () => {
      this.reconnectAttempt = 0;
      this.setState("connected");
    };
    transport.onLine = (line) => this.handleLine(line);
    transport.onClose = () => {
      if (this.connectionState === "closed") return;
      this.setState("reconnecting");
      // no fabricated samples while down: the history simply has a gap
      const delay = this.delays[Math.min(this.reconnectAttempt, this.delays.length - 1)];
      this.reconnectAttempt += 1;
      this.reconnectTimer = setTimeout(() => this.open(), delay);
    };
  }

  close(): void {
    this.setState("closed");
    if (this.reconnectTimer !== null) clearTimeout(this.reconnectTimer);
    this.transport?.close();
  }

  private handleLine(line: string): void {
    let parsed;
    try {
      parsed = parseLine(line);
    } catch {
      return; // tolerate garbage on the stream, never crash the console
    }
    if (parsed.kind === "frame") {
      this.lastFrame = parsed.frame;
      this.headingHistory.push({
        t: parsed.frame.timestampMs / 1000,
        yaw: parsed.frame.yaw,
        setpoint: this.setpoint,
      });
      this.opts.onFrame?.(parsed.frame);
    } else if (parsed.kind === "ack") {
      this.handleAck(parsed.ack);
    }
  }

  private handleAck(ack: Ack): void {
    if (ack.kind === "ok") {
      const entry = this.commandLog.find((e) => e.seq === ack.seq);
      if (entry) {
        entry.status = "acked";
        entry.tick = ack.tick;
        this.opts.onCommandLog?.(entry);
      }
      return;
    }
    // the simulator names no seq on errors; flag the oldest unacked send
    const entry = this.commandLog.find((e) => e.status === "sent");
    if (entry) {
      entry.status = "rejected";
      entry.error = `${ack.error} ${ack.message}`.trim();
      this.opts.onCommandLog?.(entry);
    }
  }

  /** Validate, sequence, log and send one command. Returns the entry. */
  send(cmd: CommandInput): CommandLogEntry {
    const seq = this.commandSeq + 1;
    const full = { ...cmd, seq } as Command;
    const problem = validateCommand(full);
    const line = encodeCommand(full);
    if (problem !== null) {
      // blocked client-side: logged for the operator, never sent
      const entry: CommandLogEntry = { seq: 0, line, status: "blocked", error: problem };
      this.commandLog.push(entry);
      this.opts.onCommandLog?.(entry);
      return entry;
    }
    this.commandSeq = seq;
    const entry: CommandLogEntry = { seq, line, status: "sent" };
    this.commandLog.push(entry);
    if (full.kind === "Engage") this.setpoint = full.setpoint;
    if (full.kind === "Disengage") this.setpoint = null;
    this.transport?.send(line);
    this.opts.onCommandLog?.(entry);
    return entry;
  }

  setManualThrust(thrust: [number, number, number]): CommandLogEntry {
    return this.send({ kind: "SetManualThrust", thrust });
  }

  engage(setpoint: number, kp: number, ki = 0, kd = 0): CommandLogEntry {
    return this.send({ kind: "Engage", setpoint, kp, ki, kd });
  }

  disengage(): CommandLogEntry {
    return this.send({ kind: "Disengage" });
  }
}
