/**
 * End-to-end console loop against the real simulator: manual thrust,
 * engage heading lock, then replay the logged command sequence
 * headlessly and compare the telemetry traces.
 */

import { spawn, spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { CommandLogEntry, StationSession } from "../src/session.js";
import { TcpTransport } from "./tcpTransport.js";

const DURATION_S = 8;
const workdir = mkdtempSync(join(tmpdir(), "station-ui-"));
const liveLog = join(workdir, "live.csv");

let session: StationSession;
let serveExit: Promise<number | null>;
let serveExitSettled = false;
const ackOrder: CommandLogEntry[] = [];

function waitFor(cond: () => boolean, timeoutMs: number, what: string): Promise<void> {
  return new Promise((resolve, reject) => {
    const t0 = Date.now();
    const timer = setInterval(() => {
      if (cond()) {
        clearInterval(timer);
        resolve();
      } else if (Date.now() - t0 > timeoutMs) {
        clearInterval(timer);
        reject(new Error(`timed out waiting for ${what}`));
      }
    }, 10);
  });
}

describe("console loop against a live simulator", () => {
  beforeAll(async () => {
    const serve = spawn("python3", [
      "-m",
      "auvsim.cli",
      "serve",
      "--listen",
      "127.0.0.1:0",
      "--rate",
      "35",
      "--realtime",
      "--duration",
      String(DURATION_S),
      "--log",
      liveLog,
    ]);
    serveExit = new Promise((resolve) => serve.on("exit", resolve));
    void serveExit.then(() => {
      serveExitSettled = true;
    });

    const endpoint = await new Promise<{ host: string; port: number }>(
      (resolve, reject) => {
        let out = "";
        serve.stdout.on("data", (chunk) => {
          out += chunk.toString();
          const m = out.match(/listening on ([\d.]+):(\d+)/);
          if (m) resolve({ host: m[1], port: Number(m[2]) });
        });
        serve.on("exit", () => reject(new Error("simulator exited early:\n" + out)));
        setTimeout(() => reject(new Error("no listen line from simulator")), 10000);
      },
    );

    session = new StationSession(
      () => new TcpTransport(endpoint.host, endpoint.port),
      {
        onCommandLog: (e) => {
          if (e.status === "acked") ackOrder.push(e);
        },
      },
    );
  }, 20000);

  afterAll(() => {
    session?.close();
  });

  it("streams frames within a second of connecting", async () => {
    await waitFor(() => session.lastFrame !== null, 2000, "first frame");
    expect(session.connectionState).toBe("connected");
  }, 10000);

  it("applies manual thrust then heading lock, acked in order", async () => {
    const thrustEntry = session.setManualThrust([0.3, 0.3, 0.3]);
    await waitFor(() => thrustEntry.status === "acked", 3000, "thrust ack");

    await waitFor(
      () => (session.lastFrame?.timestampMs ?? 0) >= 1500,
      5000,
      "cruise phase",
    );
    const engageEntry = session.engage(120, 5);
    await waitFor(() => engageEntry.status === "acked", 3000, "engage ack");

    // on-screen log order equals simulator application order
    expect(session.commandLog.map((e) => e.seq)).toEqual([1, 2]);
    expect(ackOrder.map((e) => e.seq)).toEqual([1, 2]);
    expect(thrustEntry.tick!).toBeLessThanOrEqual(engageEntry.tick!);
  }, 15000);

  it("shows the setpoint step and the heading converging", async () => {
    await waitFor(
      () => serveExitSettled,
      (DURATION_S + 5) * 1000,
      "simulator shutdown",
    );
    const hist = session.headingHistory.toArray();
    const before = hist.filter((s) => s.setpoint === null);
    const after = hist.filter((s) => s.setpoint !== null);
    expect(before.length).toBeGreaterThan(0);
    expect(after.length).toBeGreaterThan(35); // > 1 s of locked telemetry
    expect(after.every((s) => s.setpoint === 120)).toBe(true);
    // step appears at the engage time, not retroactively
    expect(Math.max(...before.map((s) => s.t))).toBeLessThan(
      Math.min(...after.map((s) => s.t)) + 1e-9,
    );
    // the vehicle turned toward the setpoint
    const errStart = Math.abs(120 - after[0].yaw);
    const errEnd = Math.abs(120 - after[after.length - 1].yaw);
    expect(errEnd).toBeLessThan(errStart);
  }, (DURATION_S + 10) * 1000);

  it("replaying the command log reproduces the telemetry trace", () => {
    const lines = session.commandLog
      .filter((e) => e.status === "acked")
      .map((e) => `${e.tick} ${e.line}`);
    expect(lines).toHaveLength(2);
    const cmdFile = join(workdir, "commands.txt");
    writeFileSync(cmdFile, lines.join("\n") + "\n");

    const replayLog = join(workdir, "replay.csv");
    const replay = spawnSync("python3", [
      "-m",
      "auvsim.cli",
      "replay",
      "--commands",
      cmdFile,
      "--duration",
      String(DURATION_S),
      "--rate",
      "35",
      "--out",
      replayLog,
    ]);
    expect(replay.status, replay.stderr?.toString()).toBe(0);
    expect(readFileSync(replayLog, "utf-8")).toBe(readFileSync(liveLog, "utf-8"));
  }, 30000);
});
