import { describe, expect, it } from "vitest";

import {
  ProtocolError,
  encodeCommand,
  parseAck,
  parseFrame,
  parseLine,
  validateCommand,
} from "../src/protocol.js";

const FRAME_LINE =
  "FRAME timestamp_ms=1029 roll=0.25 pitch=-1.5 yaw=59.75 depth=12.0 " +
  "altitude=38.0 obstacle=-1.0 rpm=900,1100,700 leak=0,0,0,0,0,0,0,0 voltage=148.2";

describe("frame parsing", () => {
  it("parses a simulator frame line", () => {
    const f = parseFrame(FRAME_LINE);
    expect(f.timestampMs).toBe(1029);
    expect(f.yaw).toBeCloseTo(59.75, 10);
    expect(f.pitch).toBeCloseTo(-1.5, 10);
    expect(f.rpm).toEqual([900, 1100, 700]);
    expect(f.leak).toHaveLength(8);
    expect(f.leak.every((v) => v === false)).toBe(true);
    expect(f.voltage).toBeCloseTo(148.2, 10);
  });

  it("flags leak channels", () => {
    const f = parseFrame(FRAME_LINE.replace("leak=0,0", "leak=1,0"));
    expect(f.leak[0]).toBe(true);
  });

  it("rejects malformed records", () => {
    expect(() => parseFrame("HELLO")).toThrow(ProtocolError);
    expect(() => parseFrame("FRAME yaw=1.0")).toThrow(ProtocolError);
    expect(() => parseFrame(FRAME_LINE + " yaw=2.0")).toThrow(/duplicate/);
    expect(() => parseFrame(FRAME_LINE.replace("59.75", "north"))).toThrow(
      ProtocolError,
    );
    expect(() => parseFrame(FRAME_LINE.replace("900,1100,700", "900,1100"))).toThrow(
      ProtocolError,
    );
  });
});

describe("command encoding", () => {
  it("matches the wire format the simulator accepts", () => {
    expect(
      encodeCommand({ kind: "SetManualThrust", seq: 1, thrust: [0.3, 0.3, 0.3] }),
    ).toBe("SetManualThrust seq=1 t=0.3,0.3,0.3");
    expect(
      encodeCommand({ kind: "Engage", seq: 2, setpoint: 120, kp: 5, ki: 0, kd: 0 }),
    ).toBe("Engage seq=2 setpoint=120.0 kp=5.0 ki=0.0 kd=0.0");
    expect(encodeCommand({ kind: "Disengage", seq: 3 })).toBe("Disengage seq=3");
    expect(encodeCommand({ kind: "SetGains", seq: 4, kp: 10, ki: 0.1, kd: 0.5 })).toBe(
      "SetGains seq=4 kp=10.0 ki=0.1 kd=0.5",
    );
    expect(encodeCommand({ kind: "SetCruiseThrust", seq: 5, value: 0.25 })).toBe(
      "SetCruiseThrust seq=5 value=0.25",
    );
  });
});

describe("client-side validation", () => {
  it("accepts in-range commands", () => {
    expect(
      validateCommand({ kind: "Engage", seq: 1, setpoint: 120, kp: 5, ki: 0, kd: 0 }),
    ).toBeNull();
    expect(
      validateCommand({ kind: "SetManualThrust", seq: 1, thrust: [0.3, -1, 1] }),
    ).toBeNull();
  });

  it("blocks out-of-range commands", () => {
    expect(
      validateCommand({ kind: "Engage", seq: 1, setpoint: 120, kp: -1, ki: 0, kd: 0 }),
    ).toMatch(/nonnegative/);
    expect(
      validateCommand({ kind: "Engage", seq: 1, setpoint: 360, kp: 5, ki: 0, kd: 0 }),
    ).toMatch(/setpoint/);
    expect(
      validateCommand({ kind: "SetManualThrust", seq: 1, thrust: [1.5, 0, 0] }),
    ).toMatch(/thrust/);
    expect(validateCommand({ kind: "SetCruiseThrust", seq: 1, value: 1.2 })).toMatch(
      /cruise/,
    );
  });
});

describe("ack parsing", () => {
  it("parses OK and ERR lines", () => {
    expect(parseAck("OK seq=3 tick=41")).toEqual({ kind: "ok", seq: 3, tick: 41 });
    expect(parseAck("ERR StaleSequence seq 2 <= last seen 2")).toEqual({
      kind: "err",
      error: "StaleSequence",
      message: "seq 2 <= last seen 2",
    });
    expect(parseAck("FRAME ...")).toBeNull();
  });

  it("classifies inbound lines", () => {
    expect(parseLine(FRAME_LINE).kind).toBe("frame");
    expect(parseLine("OK seq=1 tick=0").kind).toBe("ack");
    expect(parseLine("???").kind).toBe("unknown");
  });
});
