import { SubmitOutcome } from "./api.js";
import { PredictRequest } from "./types.js";

export type PostFn = (request: PredictRequest) => Promise<SubmitOutcome>;
export type ApplyFn = (outcome: SubmitOutcome, sequence: number) => void;

export const DEBOUNCE_MS = 250;

/**
 * Serializes predict submissions.
 *
 * Slider drags funnel through request(), which debounces before
 * dispatching. At most one request is in flight at a time; anything
 * submitted meanwhile replaces the queued follow-up. Each dispatch gets
 * a monotonically increasing sequence number, and an outcome is applied
 * only when no newer submission exists, so stale responses never reach
 * the screen.
 */
export class SubmitController {
  private readonly post: PostFn;
  private readonly apply: ApplyFn;
  private readonly debounceMs: number;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private inFlight = false;
  private queued: PredictRequest | null = null;
  private issued = 0;
  private appliedSequence = 0;

  constructor(post: PostFn, apply: ApplyFn, debounceMs: number = DEBOUNCE_MS) {
    this.post = post;
    this.apply = apply;
    this.debounceMs = debounceMs;
  }

  /** True while a request is on the wire or waiting behind one. */
  get pending(): boolean {
    return this.inFlight || this.queued !== null;
  }

  /** Debounced entry point for rapid control changes. */
  request(request: PredictRequest): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
    }
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.dispatch(request);
    }, this.debounceMs);
  }

  /** Immediate entry point for explicit submits. */
  submitNow(request: PredictRequest): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    void this.dispatch(request);
  }

  private async dispatch(request: PredictRequest): Promise<void> {
    if (this.inFlight) {
      this.queued = request;
      return;
    }
    this.inFlight = true;
    const sequence = ++this.issued;
    let outcome: SubmitOutcome;
    try {
      outcome = await this.post(request);
    } catch (err) {
      const message = err instanceof Error ? err.message : String(err);
      outcome = { kind: "unreachable", message };
    }
    this.inFlight = false;
    const superseded = this.queued !== null || sequence < this.issued;
    if (!superseded && sequence > this.appliedSequence) {
      this.appliedSequence = sequence;
      this.apply(outcome, sequence);
    }
    if (this.queued !== null) {
      const next = this.queued;
      this.queued = null;
      void this.dispatch(next);
    }
  }
}
