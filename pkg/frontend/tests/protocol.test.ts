import { describe, expect, it } from "vitest";
import {
  INSTRUMENTS,
  configGetFrame,
  parseServerMessage,
  tiltFrame,
} from "../src/protocol.js";

const GAINS_FRAME = {
  type: "gains",
  piano: 1.25,
  keyboard: 0.75,
  guitar: 1.0,
  drums: 1.0,
  synth: 0.0,
  gate_on: false,
  seq: 7,
};

const CONFIG_FRAME = {
  type: "config",
  master_gain: 0.25,
  ramp_ms: 20.0,
  alpha: 0.25,
  sample_rate_hz: 48000,
  bpm: 120,
  beats_per_loop: 16, // extra fields are tolerated
  hysteresis_deg: 0.2,
};

describe("parseServerMessage", () => {
  it("parses a gains frame with all five instruments", () => {
    const msg = parseServerMessage(JSON.stringify(GAINS_FRAME));
    expect(msg).not.toBeNull();
    if (msg === null || msg.type !== "gains") throw new Error("expected gains");
    for (const name of INSTRUMENTS) {
      expect(msg[name]).toBe(GAINS_FRAME[name]);
    }
    expect(msg.gate_on).toBe(false);
    expect(msg.seq).toBe(7);
  });

  it("parses a config frame and keeps extra fields reachable", () => {
    const msg = parseServerMessage(JSON.stringify(CONFIG_FRAME));
    if (msg === null || msg.type !== "config") throw new Error("expected config");
    expect(msg.master_gain).toBe(0.25);
    expect(msg.alpha).toBe(0.25);
    expect(msg.ramp_ms).toBe(20.0);
    expect(msg.sample_rate_hz).toBe(48000);
    expect(msg.bpm).toBe(120);
    expect(msg["beats_per_loop"]).toBe(16);
  });

  it("parses an error frame", () => {
    const msg = parseServerMessage(
      JSON.stringify({ type: "error", code: "sample_rejected", text: "magnitude 0.1 g" }),
    );
    if (msg === null || msg.type !== "error") throw new Error("expected error");
    expect(msg.code).toBe("sample_rejected");
    expect(msg.text).toContain("magnitude");
  });

  it("returns null for text that is not JSON", () => {
    expect(parseServerMessage("not json {")).toBeNull();
  });

  it("returns null for JSON that is not an object", () => {
    expect(parseServerMessage("42")).toBeNull();
    expect(parseServerMessage('"gains"')).toBeNull();
    expect(parseServerMessage("[1, 2, 3]")).toBeNull();
    expect(parseServerMessage("null")).toBeNull();
  });

  it("returns null for unknown frame types", () => {
    expect(parseServerMessage(JSON.stringify({ type: "telemetry", x: 1 }))).toBeNull();
    expect(parseServerMessage(JSON.stringify({ x: 1 }))).toBeNull();
  });

  it("returns null when a gains frame misses an instrument", () => {
    const { synth: _synth, ...partial } = GAINS_FRAME;
    expect(parseServerMessage(JSON.stringify(partial))).toBeNull();
  });

  it("returns null for non-finite or wrong-typed gains fields", () => {
    // 1e999 overflows to Infinity in JSON.parse, exercising the finite check.
    expect(
      parseServerMessage('{"type":"gains","piano":1e999,"keyboard":1,"guitar":1,"drums":1,"synth":1,"gate_on":true,"seq":1}'),
    ).toBeNull();
    expect(
      parseServerMessage(JSON.stringify({ ...GAINS_FRAME, piano: "loud" })),
    ).toBeNull();
    expect(
      parseServerMessage(JSON.stringify({ ...GAINS_FRAME, gate_on: 1 })),
    ).toBeNull();
    expect(
      parseServerMessage(JSON.stringify({ ...GAINS_FRAME, seq: "7" })),
    ).toBeNull();
  });

  it("returns null when a config frame misses a required field", () => {
    const { alpha: _alpha, ...partial } = CONFIG_FRAME;
    expect(parseServerMessage(JSON.stringify(partial))).toBeNull();
  });

  it("returns null for an error frame with non-string fields", () => {
    expect(parseServerMessage(JSON.stringify({ type: "error", code: 7, text: "x" }))).toBeNull();
    expect(parseServerMessage(JSON.stringify({ type: "error", code: "x" }))).toBeNull();
  });
});

describe("tiltFrame", () => {
  it("serializes angles under the expected keys", () => {
    const parsed = JSON.parse(tiltFrame(-12.5, 30)) as Record<string, unknown>;
    expect(parsed).toEqual({ type: "tilt", pitch_deg: -12.5, roll_deg: 30 });
  });

  it("rejects non-finite angles", () => {
    expect(() => tiltFrame(Number.NaN, 0)).toThrow(/finite/);
    expect(() => tiltFrame(0, Number.POSITIVE_INFINITY)).toThrow(/finite/);
  });
});

describe("configGetFrame", () => {
  it("serializes the config request", () => {
    expect(JSON.parse(configGetFrame())).toEqual({ type: "config-get" });
  });
});
