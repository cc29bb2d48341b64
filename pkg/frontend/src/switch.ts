/** The switch: key events in, click timestamps out.
 *
 * One physical press produces exactly one click.  Auto-repeat events and
 * repeated keydowns while the key is held are dropped.  An optional latency
 * injector adds mean + uniform jitter to every click timestamp, as a stand-in
 * for slowed motor responses.
 */

export interface KeyEventLike {
  code: string;
  repeat?: boolean;
}

export interface SwitchOptions {
  /** KeyboardEvent codes that count as the switch; empty means any key. */
  keys?: string[];
  latencyMeanMs?: number;
  latencyJitterMs?: number;
  /** Uniform [0, 1) source for jitter; defaults to Math.random. */
  rng?: () => number;
  /** Clock returning local ms; defaults to Date.now. */
  now?: () => number;
}

export class SwitchBinding {
  private keys: Set<string>;
  private mean: number;
  private jitter: number;
  private rng: () => number;
  private now: () => number;
  private held = new Set<string>();
  private lastStamp = -Infinity;

  constructor(opts: SwitchOptions = {}) {
    this.keys = new Set(opts.keys ?? ["Space"]);
    this.mean = opts.latencyMeanMs ?? 0;
    this.jitter = opts.latencyJitterMs ?? 0;
    this.rng = opts.rng ?? Math.random;
    this.now = opts.now ?? Date.now;
    if (this.jitter < 0 || this.mean < 0) throw new Error("latency must be >= 0");
  }

  private matches(code: string): boolean {
    return this.keys.size === 0 || this.keys.has(code);
  }

  /** Returns a click timestamp (local ms) or null if the event is ignored. */
  keyDown(ev: KeyEventLike): number | null {
    if (!this.matches(ev.code) || ev.repeat || this.held.has(ev.code)) return null;
    this.held.add(ev.code);
    let stamp = this.now() + this.mean;
    if (this.jitter > 0) stamp += (this.rng() * 2 - 1) * this.jitter;
    stamp = Math.round(stamp);
    // the server rejects out-of-order client timestamps
    if (stamp <= this.lastStamp) stamp = this.lastStamp + 1;
    this.lastStamp = stamp;
    return stamp;
  }

  keyUp(ev: KeyEventLike): void {
    this.held.delete(ev.code);
  }
}
