import { describe, expect, it } from "vitest";
import type { ServerMessage } from "../src/protocol.js";
import { WsClient, type SocketLike, type WsClientOptions, type WsStatus } from "../src/wsclient.js";

class FakeSocket implements SocketLike {
  sent: string[] = [];
  closedByClient = false;
  isOpen = false;
  onopen: (() => void) | null = null;
  onmessage: ((event: { data: unknown }) => void) | null = null;
  onclose: (() => void) | null = null;
  onerror: (() => void) | null = null;

  constructor(public url: string) {}

  send(data: string): void {
    if (!this.isOpen || this.closedByClient) throw new Error("socket not open");
    this.sent.push(data);
  }

  close(): void {
    this.closedByClient = true;
  }

  // --- test drivers (server / network side) ---
  open(): void {
    this.isOpen = true;
    this.onopen?.();
  }

  receive(data: unknown): void {
    this.onmessage?.({ data });
  }

  drop(): void {
    this.isOpen = false;
    this.onclose?.();
  }
}

class FakeTimers {
  pending: { id: number; fn: () => void; ms: number }[] = [];
  private nextId = 1;

  set = (fn: () => void, ms: number): unknown => {
    const id = this.nextId++;
    this.pending.push({ id, fn, ms });
    return id;
  };

  clear = (handle: unknown): void => {
    this.pending = this.pending.filter((t) => t.id !== handle);
  };

  runNext(): number {
    const timer = this.pending.shift();
    if (!timer) throw new Error("no pending timer");
    timer.fn();
    return timer.ms;
  }
}

function harness(overrides: Partial<WsClientOptions> = {}) {
  const sockets: FakeSocket[] = [];
  const timers = new FakeTimers();
  const messages: ServerMessage[] = [];
  const statuses: { status: WsStatus; detail: string }[] = [];
  let opened = 0;
  const client = new WsClient({
    url: "ws://unit.test/ws",
    factory: (url) => {
      const socket = new FakeSocket(url);
      sockets.push(socket);
      return socket;
    },
    onMessage: (msg) => messages.push(msg),
    onStatus: (status, detail) => statuses.push({ status, detail }),
    onOpen: () => {
      opened += 1;
    },
    setTimeoutFn: timers.set,
    clearTimeoutFn: timers.clear,
    ...overrides,
  });
  return {
    client,
    sockets,
    timers,
    messages,
    statuses,
    openCount: () => opened,
    latest: () => sockets[sockets.length - 1]!,
  };
}

const GAINS_JSON =
  '{"type":"gains","piano":1,"keyboard":1,"guitar":1,"drums":1,"synth":1,"gate_on":true,"seq":1}';

describe("WsClient connect", () => {
  it("opens a socket to the url and reports connecting then connected", () => {
    const h = harness();
    h.client.connect();
    expect(h.sockets).toHaveLength(1);
    expect(h.latest().url).toBe("ws://unit.test/ws");
    expect(h.statuses).toEqual([{ status: "connecting", detail: "" }]);
    expect(h.openCount()).toBe(0);

    h.latest().open();
    expect(h.statuses[1]).toEqual({ status: "connected", detail: "" });
    expect(h.openCount()).toBe(1);
    expect(h.client.isConnected).toBe(true);
  });

  it("is idempotent while a socket is live", () => {
    const h = harness();
    h.client.connect();
    h.client.connect();
    expect(h.sockets).toHaveLength(1);
  });
});

describe("WsClient message handling", () => {
  it("forwards parsed protocol frames and drops garbage silently", () => {
    const h = harness();
    h.client.connect();
    h.latest().open();

    h.latest().receive(GAINS_JSON);
    h.latest().receive("not json {");
    h.latest().receive(JSON.stringify({ type: "mystery" }));
    h.latest().receive(new ArrayBuffer(4)); // binary frames are ignored

    expect(h.messages).toHaveLength(1);
    const msg = h.messages[0]!;
    expect(msg.type).toBe("gains");
    if (msg.type === "gains") expect(msg.seq).toBe(1);
  });
});

describe("WsClient send", () => {
  it("drops frames while disconnected and delivers them while open", () => {
    const h = harness();
    expect(h.client.send("x")).toBe(false); // never connected

    h.client.connect();
    expect(h.client.send("x")).toBe(false); // still in handshake: socket throws

    h.latest().open();
    expect(h.client.send('{"type":"config-get"}')).toBe(true);
    expect(h.latest().sent).toEqual(['{"type":"config-get"}']);
  });
});

describe("WsClient reconnect", () => {
  it("retries on a capped backoff schedule, last delay repeating", () => {
    const h = harness();
    h.client.connect();
    h.latest().open();

    const observed: number[] = [];
    for (let i = 0; i < 5; i++) {
      h.latest().drop();
      expect(h.timers.pending).toHaveLength(1);
      observed.push(h.timers.runNext()); // fires the scheduled connect()
    }
    expect(observed).toEqual([500, 1000, 2000, 5000, 5000]);
    expect(h.sockets).toHaveLength(6); // original + five retries
  });

  it("announces the retry delay and the attempt number", () => {
    const h = harness({ reconnectDelaysMs: [10, 20] });
    h.client.connect();
    h.latest().open();
    h.latest().drop();
    expect(h.statuses[2]).toEqual({ status: "reconnecting", detail: "retry in 10 ms" });
    h.timers.runNext();
    expect(h.statuses[3]).toEqual({ status: "reconnecting", detail: "attempt 2" });
  });

  it("resets the backoff once a connection succeeds", () => {
    const h = harness({ reconnectDelaysMs: [10, 20] });
    h.client.connect();
    h.latest().open();

    h.latest().drop();
    expect(h.timers.runNext()).toBe(10);
    h.latest().drop();
    expect(h.timers.runNext()).toBe(20);
    h.latest().drop();
    expect(h.timers.runNext()).toBe(20); // last entry repeats

    h.latest().open(); // success resets the schedule
    h.latest().drop();
    expect(h.timers.runNext()).toBe(10);
  });
});

describe("WsClient close", () => {
  it("is final: closes the socket, emits closed, and never reconnects", () => {
    const h = harness();
    h.client.connect();
    const socket = h.latest();
    socket.open();

    h.client.close();
    expect(socket.closedByClient).toBe(true);
    expect(h.statuses[h.statuses.length - 1]).toEqual({ status: "closed", detail: "" });
    expect(h.client.isConnected).toBe(false);

    socket.drop(); // late close event from the network must not resurrect it
    expect(h.timers.pending).toHaveLength(0);
    expect(h.client.send("x")).toBe(false);
    expect(() => h.client.connect()).toThrow(/closed/);
  });

  it("cancels a pending reconnect timer", () => {
    const h = harness();
    h.client.connect();
    h.latest().open();
    h.latest().drop();
    expect(h.timers.pending).toHaveLength(1);

    h.client.close();
    expect(h.timers.pending).toHaveLength(0);
  });
});
