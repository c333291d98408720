/**
 * Browser entry point: downloads and decodes the stem bank, starts muted
 * looped playback, opens the control channel, and wires tilt input (desktop
 * sliders or device orientation) to outbound frames at ≤ 60 messages/s.
 *
 * Faders, the LEVEL badge and the audible channel gains all derive from the
 * same last gains frame; the bubble shows the smoothed tilt using the
 * server's own alpha (from the config frame).
 */

import { AudioEngine, type AudioBufferLike } from "./audio.js";
import { parseManifest, type StemManifest } from "./manifest.js";
import { orientationToTilt, type Tilt } from "./orientation.js";
import {
  configGetFrame,
  INSTRUMENTS,
  tiltFrame,
  type Instrument,
  type ServerMessage,
} from "./protocol.js";
import { RateLimiter } from "./ratelimit.js";
import {
  applyGains,
  applyStatus,
  applyTiltSample,
  markPlaybackStarted,
  playbackPosition,
  setSource,
  Store,
} from "./state.js";
import { WsClient, type SocketLike } from "./wsclient.js";

const MAX_SEND_RATE_HZ = 60;
const DEFAULT_ALPHA = 0.25;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node as T;
}

async function fetchStems(
  manifest: StemManifest,
  ctx: AudioContext,
): Promise<Record<Instrument, AudioBufferLike>> {
  const decoded = await Promise.all(
    INSTRUMENTS.map(async (name) => {
      const response = await fetch(`stems/${manifest.files[name]}`);
      if (!response.ok) {
        throw new Error(`failed to fetch ${manifest.files[name]}: HTTP ${response.status}`);
      }
      return [name, await ctx.decodeAudioData(await response.arrayBuffer())] as const;
    }),
  );
  return Object.fromEntries(decoded) as Record<Instrument, AudioBuffer>;
}

export async function startSession(): Promise<void> {
  const store = new Store();
  const statusEl = el<HTMLSpanElement>("status");
  const badgeEl = el<HTMLSpanElement>("level-badge");
  const bubbleEl = el<HTMLDivElement>("bubble");
  const positionEl = el<HTMLSpanElement>("position");
  const retryEl = el<HTMLButtonElement>("retry");
  const sensorEl = el<HTMLButtonElement>("use-sensor");
  const pitchSlider = el<HTMLInputElement>("pitch-slider");
  const rollSlider = el<HTMLInputElement>("roll-slider");
  const faderEls = {} as Record<Instrument, HTMLDivElement>;
  const faderValueEls = {} as Record<Instrument, HTMLSpanElement>;
  for (const name of INSTRUMENTS) {
    faderEls[name] = el<HTMLDivElement>(`fader-${name}`);
    faderValueEls[name] = el<HTMLSpanElement>(`fader-value-${name}`);
  }

  let alpha = DEFAULT_ALPHA;
  const limiter = new RateLimiter(MAX_SEND_RATE_HZ, () => performance.now());

  const ctx = new AudioContext();
  const engine = new AudioEngine(ctx);

  store.apply((s) => applyStatus(s, "connecting", "loading stems"));
  render();

  try {
    const manifestResponse = await fetch("stems/manifest.txt");
    if (!manifestResponse.ok) {
      throw new Error(`manifest fetch failed: HTTP ${manifestResponse.status}`);
    }
    const manifest = parseManifest(await manifestResponse.text());
    const buffers = await fetchStems(manifest, ctx);
    engine.start(buffers); // all five, muted, one shared start time
    store.apply((s) =>
      markPlaybackStarted(s, engine.startedAt ?? 0, engine.loopDuration ?? 1),
    );
  } catch (error) {
    store.apply((s) => applyStatus(s, "error", String(error)));
    render();
    retryEl.hidden = false;
    return;
  }

  const scheme = location.protocol === "https:" ? "wss" : "ws";
  const client = new WsClient({
    url: `${scheme}://${location.host}/ws`,
    // The client only assigns handlers and calls send/close, all of which
    // the DOM WebSocket provides; the cast bridges the handler-parameter
    // variance in the DOM lib's declarations.
    factory: (url) => new WebSocket(url) as unknown as SocketLike,
    onOpen: () => client.send(configGetFrame()),
    onStatus: (status, detail) => {
      store.apply((s) =>
        applyStatus(s, status === "closed" ? "idle" : status, detail),
      );
    },
    onMessage: (msg: ServerMessage) => {
      if (msg.type === "gains") {
        engine.applyGains(msg); // audio and faders: same frame
        store.apply((s) => applyGains(s, msg));
      } else if (msg.type === "config") {
        alpha = msg.alpha;
        engine.setMasterGain(msg.master_gain);
      } else {
        store.apply((s) => applyStatus(s, s.status, `${msg.code}: ${msg.text}`));
      }
    },
  });
  client.connect();

  function sendTilt(tilt: Tilt): void {
    store.apply((s) => applyTiltSample(s, tilt, alpha));
    if (limiter.tryAcquire()) {
      client.send(tiltFrame(tilt.pitchDeg, tilt.rollDeg));
    }
  }

  function sliderTilt(): Tilt {
    return {
      pitchDeg: Number(pitchSlider.value),
      rollDeg: Number(rollSlider.value),
    };
  }
  pitchSlider.addEventListener("input", () => sendTilt(sliderTilt()));
  rollSlider.addEventListener("input", () => sendTilt(sliderTilt()));

  sensorEl.addEventListener("click", async () => {
    // iOS exposes a permission gate that must run inside this user gesture;
    // Android/desktop fire deviceorientation without one.
    const ctor = DeviceOrientationEvent as unknown as {
      requestPermission?: () => Promise<string>;
    };
    if (typeof ctor.requestPermission === "function") {
      const outcome = await ctor.requestPermission();
      if (outcome !== "granted") return;
    }
    window.addEventListener("deviceorientation", (event) => {
      if (event.beta === null || event.gamma === null) return;
      const angle =
        (screen.orientation?.angle as number | undefined) ??
        (typeof window.orientation === "number" ? ((window.orientation % 360) + 360) % 360 : 0);
      sendTilt(orientationToTilt(event.beta, event.gamma, angle));
    });
    store.apply((s) => setSource(s, "sensor"));
    sensorEl.disabled = true;
  });

  retryEl.addEventListener("click", () => location.reload());

  function render(): void {
    const state = store.state;
    statusEl.textContent =
      state.statusDetail === "" ? state.status : `${state.status} — ${state.statusDetail}`;
    statusEl.dataset["status"] = state.status;
    badgeEl.classList.toggle("on", state.gateOn);
    for (const name of INSTRUMENTS) {
      const value = state.faders[name];
      faderEls[name].style.height = `${Math.min(100, (value / 2) * 100)}%`;
      faderValueEls[name].textContent = value.toFixed(2);
    }
    if (state.bubble !== null) {
      // ±90° maps onto ±50% of the level square, engine clamp included.
      const x = (state.bubble.rollDeg / 90) * 50;
      const y = (state.bubble.pitchDeg / 90) * 50;
      bubbleEl.style.left = `${50 + x}%`;
      bubbleEl.style.top = `${50 + y}%`;
    }
    const position = playbackPosition(state, ctx.currentTime);
    positionEl.textContent = position === null ? "—" : `${position.toFixed(2)} s`;
  }

  function frame(): void {
    render();
    requestAnimationFrame(frame);
  }
  requestAnimationFrame(frame);
}

el<HTMLButtonElement>("start").addEventListener("click", (event) => {
  (event.currentTarget as HTMLButtonElement).disabled = true;
  void startSession();
});
