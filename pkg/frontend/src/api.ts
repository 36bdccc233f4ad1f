/** Thin typed client for the sarlab REST API. */

import type { Job, PipelineConfig, Preset, ResolutionReport } from './types';

export class ApiError extends Error {
  status: number;
  field: string | null;

  constructor(status: number, message: string, field: string | null = null) {
    super(message);
    this.status = status;
    this.field = field;
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const resp = await fetch(url, init);
  if (!resp.ok) {
    let message = `${resp.status} ${resp.statusText}`;
    let field: string | null = null;
    try {
      const body = await resp.json();
      const detail = body.detail ?? body;
      if (typeof detail === 'string') {
        message = detail;
      } else if (detail && typeof detail === 'object') {
        message = detail.message ?? message;
        field = detail.field ?? null;
      }
    } catch {
      /* non-JSON error body: keep the status text */
    }
    throw new ApiError(resp.status, message, field);
  }
  return (await resp.json()) as T;
}

export class ApiClient {
  base: string;

  constructor(base = '') {
    this.base = base.replace(/\/$/, '');
  }

  async presets(): Promise<Preset[]> {
    return request<Preset[]>(`${this.base}/api/v1/presets`);
  }

  async submitJob(type: string, config: PipelineConfig | Record<string, unknown>): Promise<Job> {
    return request<Job>(`${this.base}/api/v1/jobs`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ type, config }),
    });
  }

  async jobStatus(id: string): Promise<Job> {
    return request<Job>(`${this.base}/api/v1/jobs/${encodeURIComponent(id)}`);
  }

  async resolution(params: Record<string, string | number>, signal?: AbortSignal): Promise<ResolutionReport> {
    const query = new URLSearchParams(
      Object.entries(params).map(([k, v]) => [k, String(v)]),
    );
    return request<ResolutionReport>(
      `${this.base}/api/v1/metrics/resolution?${query}`, { signal });
  }

  /** URL of the server-rendered PNG for a finished job. */
  imageUrl(id: string, opts: { mode?: string; axis?: number; index?: number; dr?: number } = {}): string {
    const query = new URLSearchParams();
    query.set('mode', opts.mode ?? 'mip');
    query.set('axis', String(opts.axis ?? 0));
    query.set('index', String(opts.index ?? 0));
    query.set('dr', String(opts.dr ?? 40));
    return `${this.base}/api/v1/jobs/${encodeURIComponent(id)}/image?${query}`;
  }
}
