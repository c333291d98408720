/**
 * Wire protocol spoken with the control service: JSON text frames over a
 * WebSocket. Client frames carry tilt angles (degrees) or a config request;
 * server frames carry per-instrument gains, the flat config, or an error.
 *
 * Guards are hand-rolled so the browser bundle has zero runtime
 * dependencies; unknown frame types and malformed payloads parse to `null`
 * rather than throwing, because a live socket must survive garbage.
 */

export const INSTRUMENTS = ["piano", "keyboard", "guitar", "drums", "synth"] as const;
export type Instrument = (typeof INSTRUMENTS)[number];

export interface GainsMessage {
  type: "gains";
  piano: number;
  keyboard: number;
  guitar: number;
  drums: number;
  synth: number;
  gate_on: boolean;
  seq: number;
}

export interface ConfigMessage {
  type: "config";
  master_gain: number;
  ramp_ms: number;
  alpha: number;
  sample_rate_hz: number;
  bpm: number;
  [key: string]: unknown;
}

export interface ErrorMessage {
  type: "error";
  code: string;
  text: string;
}

export type ServerMessage = GainsMessage | ConfigMessage | ErrorMessage;

function isFiniteNumber(value: unknown): value is number {
  return typeof value === "number" && Number.isFinite(value);
}

function isRecord(value: unknown): value is Record<string, unknown> {
  return typeof value === "object" && value !== null && !Array.isArray(value);
}

function isGains(value: Record<string, unknown>): value is GainsMessage & Record<string, unknown> {
  return (
    INSTRUMENTS.every((name) => isFiniteNumber(value[name])) &&
    typeof value["gate_on"] === "boolean" &&
    isFiniteNumber(value["seq"])
  );
}

function isConfig(value: Record<string, unknown>): value is ConfigMessage & Record<string, unknown> {
  return (
    isFiniteNumber(value["master_gain"]) &&
    isFiniteNumber(value["ramp_ms"]) &&
    isFiniteNumber(value["alpha"]) &&
    isFiniteNumber(value["sample_rate_hz"]) &&
    isFiniteNumber(value["bpm"])
  );
}

function isError(value: Record<string, unknown>): value is ErrorMessage & Record<string, unknown> {
  return typeof value["code"] === "string" && typeof value["text"] === "string";
}

/** Parse one server frame; returns null for anything off-protocol. */
export function parseServerMessage(text: string): ServerMessage | null {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch {
    return null;
  }
  if (!isRecord(raw)) return null;
  switch (raw["type"]) {
    case "gains":
      return isGains(raw) ? (raw as GainsMessage) : null;
    case "config":
      return isConfig(raw) ? (raw as ConfigMessage) : null;
    case "error":
      return isError(raw) ? (raw as ErrorMessage) : null;
    default:
      return null;
  }
}

/** Serialize a tilt frame. Angles are finite degrees; the server clamps. */
export function tiltFrame(pitchDeg: number, rollDeg: number): string {
  if (!Number.isFinite(pitchDeg) || !Number.isFinite(rollDeg)) {
    throw new Error(`tilt angles must be finite, got (${pitchDeg}, ${rollDeg})`);
  }
  return JSON.stringify({ type: "tilt", pitch_deg: pitchDeg, roll_deg: rollDeg });
}

export function configGetFrame(): string {
  return JSON.stringify({ type: "config-get" });
}
