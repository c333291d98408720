/**
 * UI state: connection status, the latest server gains (which the faders
 * mirror exactly — both come from the same message, never interpolated
 * separately), the smoothed bubble tilt, and loop playback bookkeeping.
 *
 * All transitions are pure functions over an immutable state object; the
 * DOM layer subscribes to a tiny store wrapper and re-renders per frame.
 */

import { INSTRUMENTS, type GainsMessage, type Instrument } from "./protocol.js";
import { clampAngle, type Tilt } from "./orientation.js";

export type ConnectionStatus = "idle" | "connecting" | "connected" | "reconnecting" | "error";
export type TiltSource = "sliders" | "sensor";

export interface UiState {
  status: ConnectionStatus;
  statusDetail: string;
  /** Most recent gains frame; faders below are copied from it verbatim. */
  gains: GainsMessage | null;
  faders: Record<Instrument, number>;
  gateOn: boolean;
  /** Smoothed tilt for the bubble; mirrors the server's EMA, clamped ±90. */
  bubble: Tilt | null;
  source: TiltSource;
  /** Audio-clock time (seconds) when the loop started, if playing. */
  playbackStartedAtS: number | null;
  loopDurationS: number | null;
}

export function initialState(): UiState {
  const faders = {} as Record<Instrument, number>;
  for (const name of INSTRUMENTS) faders[name] = 0;
  return {
    status: "idle",
    statusDetail: "",
    gains: null,
    faders,
    gateOn: false,
    bubble: null,
    source: "sliders",
    playbackStartedAtS: null,
    loopDurationS: null,
  };
}

export function applyStatus(
  state: UiState,
  status: ConnectionStatus,
  detail = "",
): UiState {
  return { ...state, status, statusDetail: detail };
}

/** Adopt a gains frame: faders, gate badge and audio gains all derive from it. */
export function applyGains(state: UiState, msg: GainsMessage): UiState {
  const faders = {} as Record<Instrument, number>;
  for (const name of INSTRUMENTS) faders[name] = msg[name];
  return { ...state, gains: msg, faders, gateOn: msg.gate_on };
}

/**
 * Fold one raw tilt sample into the bubble position: clamp first, then EMA
 * with the same alpha the server uses (the first sample initializes).
 */
export function applyTiltSample(state: UiState, raw: Tilt, alpha: number): UiState {
  if (!(alpha > 0 && alpha <= 1)) {
    throw new Error(`alpha must be in (0, 1], got ${alpha}`);
  }
  const pitch = clampAngle(raw.pitchDeg);
  const roll = clampAngle(raw.rollDeg);
  const bubble =
    state.bubble === null
      ? { pitchDeg: pitch, rollDeg: roll }
      : {
          pitchDeg: clampAngle(state.bubble.pitchDeg + alpha * (pitch - state.bubble.pitchDeg)),
          rollDeg: clampAngle(state.bubble.rollDeg + alpha * (roll - state.bubble.rollDeg)),
        };
  return { ...state, bubble };
}

export function setSource(state: UiState, source: TiltSource): UiState {
  return { ...state, source };
}

export function markPlaybackStarted(
  state: UiState,
  startedAtS: number,
  loopDurationS: number,
): UiState {
  if (!(loopDurationS > 0)) {
    throw new Error(`loop duration must be > 0, got ${loopDurationS}`);
  }
  return { ...state, playbackStartedAtS: startedAtS, loopDurationS };
}

/** Seconds into the loop at audio-clock time `nowS`, or null before start. */
export function playbackPosition(state: UiState, nowS: number): number | null {
  if (state.playbackStartedAtS === null || state.loopDurationS === null) return null;
  const elapsed = nowS - state.playbackStartedAtS;
  if (elapsed < 0) return 0;
  return elapsed % state.loopDurationS;
}

/** Minimal observable store for the DOM layer. */
export class Store {
  private listeners = new Set<(state: UiState) => void>();

  constructor(public state: UiState = initialState()) {}

  update(next: UiState): void {
    this.state = next;
    for (const listener of this.listeners) listener(next);
  }

  apply(fn: (state: UiState) => UiState): void {
    this.update(fn(this.state));
  }

  subscribe(listener: (state: UiState) => void): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }
}
