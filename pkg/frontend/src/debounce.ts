/**
 * Trailing debounce with latest-wins delivery for refresh requests.
 *
 * Slot edits during a draft are human-paced; a 250 ms trailing window
 * collapses a burst of edits into a single request. At most one request is
 * in flight: scheduling a new one aborts its predecessor, and a response is
 * delivered only if no newer request has been fired since.
 */
import { isAbortError } from "./api.js";

export const DEBOUNCE_MS = 250;

export class DebouncedFetcher<T> {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private controller: AbortController | null = null;
  private ticket = 0;

  constructor(
    private readonly deliver: (value: T) => void,
    private readonly fail: (err: unknown) => void,
    private readonly delayMs: number = DEBOUNCE_MS,
  ) {}

  /** Queue `run` after the debounce window, replacing anything queued. */
  schedule(run: (signal: AbortSignal) => Promise<T>): void {
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      this.timer = null;
      this.fire(run);
    }, this.delayMs);
  }

  /** Fire immediately, skipping the debounce window. */
  fire(run: (signal: AbortSignal) => Promise<T>): void {
    this.controller?.abort();
    const controller = new AbortController();
    this.controller = controller;
    const ticket = ++this.ticket;
    run(controller.signal).then(
      (value) => {
        if (ticket === this.ticket) this.deliver(value);
      },
      (err) => {
        if (ticket === this.ticket && !isAbortError(err)) this.fail(err);
      },
    );
  }

  /** Drop anything queued or in flight without delivering. */
  cancel(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    this.controller?.abort();
    this.controller = null;
    this.ticket++;
  }
}
