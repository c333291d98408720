/**
 * Reconnecting WebSocket client for the control channel.
 *
 * Wraps a socket factory (injectable for tests) and turns raw events into
 * parsed protocol messages plus a connection-status stream. A dropped
 * connection reconnects on a capped backoff schedule; each new socket is a
 * brand-new server session (fresh seq, gate reset off server-side), which is
 * exactly the contract the UI expects after a drop. `close()` is final: no
 * reconnect after an intentional shutdown.
 */

import { parseServerMessage, type ServerMessage } from "./protocol.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: (() => void) | null;
  onmessage: ((event: { data: unknown }) => void) | null;
  onclose: (() => void) | null;
  onerror: (() => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export type WsStatus = "connecting" | "connected" | "reconnecting" | "closed";

export interface WsClientOptions {
  url: string;
  factory: SocketFactory;
  onMessage: (msg: ServerMessage) => void;
  onStatus?: (status: WsStatus, detail: string) => void;
  onOpen?: () => void;
  /** Backoff schedule in ms; the last entry repeats. */
  reconnectDelaysMs?: number[];
  setTimeoutFn?: (fn: () => void, ms: number) => unknown;
  clearTimeoutFn?: (handle: unknown) => void;
}

const DEFAULT_BACKOFF_MS = [500, 1000, 2000, 5000];

export class WsClient {
  private socket: SocketLike | null = null;
  private attempts = 0;
  private closed = false;
  private pendingTimer: unknown = null;
  private readonly delays: number[];
  private readonly setTimeoutFn: (fn: () => void, ms: number) => unknown;
  private readonly clearTimeoutFn: (handle: unknown) => void;

  constructor(private readonly options: WsClientOptions) {
    this.delays = options.reconnectDelaysMs ?? DEFAULT_BACKOFF_MS;
    if (this.delays.length === 0) throw new Error("backoff schedule must be non-empty");
    this.setTimeoutFn = options.setTimeoutFn ?? ((fn, ms) => setTimeout(fn, ms));
    this.clearTimeoutFn = options.clearTimeoutFn ?? ((h) => clearTimeout(h as number));
  }

  connect(): void {
    if (this.closed) throw new Error("client is closed");
    if (this.socket !== null) return;
    this.emitStatus(this.attempts === 0 ? "connecting" : "reconnecting",
                    this.attempts === 0 ? "" : `attempt ${this.attempts + 1}`);
    const socket = this.options.factory(this.options.url);
    this.socket = socket;
    socket.onopen = () => {
      this.attempts = 0;
      this.emitStatus("connected", "");
      this.options.onOpen?.();
    };
    socket.onmessage = (event) => {
      if (typeof event.data !== "string") return;
      const msg = parseServerMessage(event.data);
      if (msg !== null) this.options.onMessage(msg);
    };
    socket.onerror = () => {
      // the close handler does the bookkeeping; browsers fire close after error
    };
    socket.onclose = () => {
      this.socket = null;
      if (this.closed) return;
      this.scheduleReconnect();
    };
  }

  /** Send a frame; returns false (dropping it) when the socket is not open. */
  send(text: string): boolean {
    if (this.socket === null || this.closed) return false;
    try {
      this.socket.send(text);
      return true;
    } catch {
      return false;
    }
  }

  get isConnected(): boolean {
    return this.socket !== null;
  }

  close(): void {
    this.closed = true;
    if (this.pendingTimer !== null) {
      this.clearTimeoutFn(this.pendingTimer);
      this.pendingTimer = null;
    }
    const socket = this.socket;
    this.socket = null;
    socket?.close();
    this.emitStatus("closed", "");
  }

  private scheduleReconnect(): void {
    const delay = this.delays[Math.min(this.attempts, this.delays.length - 1)]!;
    this.attempts += 1;
    this.emitStatus("reconnecting", `retry in ${delay} ms`);
    this.pendingTimer = this.setTimeoutFn(() => {
      this.pendingTimer = null;
      this.connect();
    }, delay);
  }

  private emitStatus(status: WsStatus, detail: string): void {
    this.options.onStatus?.(status, detail);
  }
}
