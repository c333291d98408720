/**
 * Five-channel looped playback over Web Audio.
 *
 * One buffer source per stem, all started at the same audio-clock instant
 * with loop=true — channel drift is zero by construction because there is a
 * single clock and the decoded buffers are required to share one duration.
 * Per-channel gains start at 0 (playback begins muted until the server
 * speaks) and every gain change is applied as a short linear ramp on the
 * audio clock, mirroring the engine's click-free ramping.
 *
 * The engine talks to the narrow *Like interfaces below rather than the DOM
 * types so logic tests can drive it with fakes in Node.
 */

import { INSTRUMENTS, type GainsMessage, type Instrument } from "./protocol.js";

export interface AudioParamLike {
  value: number;
  cancelScheduledValues(startTime: number): unknown;
  setValueAtTime(value: number, startTime: number): unknown;
  linearRampToValueAtTime(value: number, endTime: number): unknown;
}

export interface GainNodeLike {
  gain: AudioParamLike;
  connect(destination: unknown): unknown;
}

export interface AudioBufferLike {
  duration: number;
}

export interface BufferSourceLike {
  buffer: AudioBufferLike | null;
  loop: boolean;
  connect(destination: unknown): unknown;
  start(when?: number): void;
  stop(when?: number): void;
}

export interface AudioContextLike {
  currentTime: number;
  destination: unknown;
  createGain(): GainNodeLike;
  createBufferSource(): BufferSourceLike;
}

export const DEFAULT_RAMP_MS = 20;
export const DEFAULT_MASTER_GAIN = 0.25;

function ramp(param: AudioParamLike, target: number, now: number, rampS: number): void {
  param.cancelScheduledValues(now);
  param.setValueAtTime(param.value, now); // anchor so the ramp starts here
  param.linearRampToValueAtTime(target, now + rampS);
}

export class AudioEngine {
  private readonly rampS: number;
  private readonly master: GainNodeLike;
  private channels: Map<Instrument, { source: BufferSourceLike; gain: GainNodeLike }> | null =
    null;
  private startedAtS: number | null = null;
  private loopDurS: number | null = null;

  constructor(
    private readonly ctx: AudioContextLike,
    options: { rampMs?: number; masterGain?: number } = {},
  ) {
    this.rampS = (options.rampMs ?? DEFAULT_RAMP_MS) / 1000;
    this.master = ctx.createGain();
    this.master.gain.value = options.masterGain ?? DEFAULT_MASTER_GAIN;
    this.master.connect(ctx.destination);
  }

  /**
   * Wire up all five stems and start them looping, muted, on a shared start
   * time. Buffers must share one duration (one loop length).
   */
  start(buffers: Record<Instrument, AudioBufferLike>): void {
    if (this.channels !== null) throw new Error("audio engine already started");
    const durations = INSTRUMENTS.map((name) => buffers[name].duration);
    const first = durations[0]!;
    if (!durations.every((d) => d === first)) {
      throw new Error(`stem durations differ: ${durations.join(", ")}`);
    }
    if (!(first > 0)) throw new Error("stem buffers are empty");

    const channels = new Map<Instrument, { source: BufferSourceLike; gain: GainNodeLike }>();
    const startAt = this.ctx.currentTime; // one clock, one start: no drift
    for (const name of INSTRUMENTS) {
      const gain = this.ctx.createGain();
      gain.gain.value = 0; // playback begins muted
      gain.connect(this.master);
      const source = this.ctx.createBufferSource();
      source.buffer = buffers[name];
      source.loop = true;
      source.connect(gain);
      source.start(startAt);
      channels.set(name, { source, gain });
    }
    this.channels = channels;
    this.startedAtS = startAt;
    this.loopDurS = first;
  }

  /** Apply a gains frame: one ~20 ms ramp per channel, same frame for all. */
  applyGains(msg: GainsMessage): void {
    if (this.channels === null) throw new Error("audio engine not started");
    const now = this.ctx.currentTime;
    for (const name of INSTRUMENTS) {
      ramp(this.channels.get(name)!.gain.gain, msg[name], now, this.rampS);
    }
  }

  setMasterGain(value: number): void {
    if (!(Number.isFinite(value) && value >= 0)) {
      throw new Error(`master gain must be a finite non-negative number, got ${value}`);
    }
    ramp(this.master.gain, value, this.ctx.currentTime, this.rampS);
  }

  get startedAt(): number | null {
    return this.startedAtS;
  }

  get loopDuration(): number | null {
    return this.loopDurS;
  }

  stop(): void {
    if (this.channels === null) return;
    for (const { source } of this.channels.values()) source.stop();
    this.channels = null;
    this.startedAtS = null;
    this.loopDurS = null;
  }
}
