/** Debounced live resolution metrics: at most one in-flight query, updated
 * within 500 ms of the last edit, stale responses dropped. */

import type { ApiClient } from './api';
import type { ResolutionReport } from './types';

export type MetricsListener = (report: ResolutionReport | null, error: string | null) => void;

export class LiveMetrics {
  private client: ApiClient;
  private listener: MetricsListener;
  private debounceMs: number;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private controller: AbortController | null = null;
  private generation = 0;
  requestCount = 0;

  constructor(client: ApiClient, listener: MetricsListener, debounceMs = 300) {
    this.client = client;
    this.listener = listener;
    this.debounceMs = debounceMs;
  }

  /** Schedule a query for the given parameters; earlier pending ones are
   * dropped so rapid edits never cause a request storm. */
  update(params: Record<string, string | number>): void {
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => void this.fire(params), this.debounceMs);
  }

  cancel(): void {
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = null;
    this.controller?.abort();
  }

  private async fire(params: Record<string, string | number>): Promise<void> {
    this.controller?.abort();
    const controller = new AbortController();
    this.controller = controller;
    const gen = ++this.generation;
    this.requestCount += 1;
    try {
      const report = await this.client.resolution(params, controller.signal);
      if (gen === this.generation) this.listener(report, null);
    } catch (err) {
      if (controller.signal.aborted) return;
      if (gen === this.generation) {
        this.listener(null, err instanceof Error ? err.message : String(err));
      }
    }
  }
}
