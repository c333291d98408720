/**
 * Outbound message rate limiter: minimum-interval gate guaranteeing no more
 * than `maxPerSecond` acquisitions in any one-second window, however fast
 * the sensor fires. The newest value always wins — callers drop the frame
 * when `tryAcquire` refuses and send the next sensor reading instead, so a
 * burst never queues stale tilt.
 */

export class RateLimiter {
  private readonly intervalMs: number;
  private lastMs: number | null = null;

  constructor(maxPerSecond: number, private readonly now: () => number) {
    if (!(maxPerSecond > 0)) {
      throw new Error(`maxPerSecond must be > 0, got ${maxPerSecond}`);
    }
    this.intervalMs = 1000 / maxPerSecond;
  }

  tryAcquire(): boolean {
    const t = this.now();
    if (this.lastMs !== null && t - this.lastMs < this.intervalMs) {
      return false;
    }
    this.lastMs = t;
    return true;
  }

  reset(): void {
    this.lastMs = null;
  }
}
