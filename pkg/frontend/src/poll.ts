/** Job polling: 1 s interval backing off to 5 s, cancelable so navigating
 * away never orphans the loop. */

import type { ApiClient } from './api';
import type { Job } from './types';

export interface PollHandle {
  done: Promise<Job>;
  cancel: () => void;
}

export class PollCancelled extends Error {
  constructor() {
    super('poll cancelled');
  }
}

export function nextInterval(current: number): number {
  return Math.min(current * 1.5, 5000);
}

export function pollJob(
  client: ApiClient,
  jobId: string,
  onUpdate?: (job: Job) => void,
  startIntervalMs = 1000,
): PollHandle {
  let cancelled = false;
  let timer: ReturnType<typeof setTimeout> | null = null;
  let settled = false;
  let rejectDone: (err: unknown) => void = () => {};

  const done = new Promise<Job>((resolve, reject) => {
    rejectDone = reject;
    let interval = startIntervalMs;

    const finish = (fn: () => void) => {
      if (!settled) {
        settled = true;
        fn();
      }
    };

    const tick = async () => {
      if (cancelled) return;
      let job: Job;
      try {
        job = await client.jobStatus(jobId);
      } catch (err) {
        finish(() => reject(err));
        return;
      }
      if (cancelled) return;
      onUpdate?.(job);
      if (job.status === 'done' || job.status === 'failed') {
        finish(() => resolve(job));
        return;
      }
      timer = setTimeout(tick, interval);
      interval = nextInterval(interval);
    };

    void tick();
  });

  return {
    done,
    cancel: () => {
      cancelled = true;
      if (timer !== null) clearTimeout(timer);
      if (!settled) {
        settled = true;
        rejectDone(new PollCancelled());
      }
    },
  };
}
