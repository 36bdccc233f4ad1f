/** Shared test fixtures: a trimmed fig5d preset (same schema the service
 * serves, scene reduced to a few glyph points) and a scripted fetch mock
 * implementing the /api/v1 contract. */

import type { Job, Preset } from '../src/types';

export const FIG5D: Preset = {
  id: 'fig5d',
  name: 'Linear 256 el / 10 GHz',
  description: 'UTD glyph, 435 GHz linear SAR, 256 elements at lambda/4, 10 GHz bandwidth',
  config: {
    waveform: {
      type: 'fmcw', f0: 430e9, K: 1e14, Tc: 1e-4, Tr: 1.2e-4,
      Nc: 1, fS: 2e6, Nf: 64,
    },
    aperture: { kind: 'linear', Ny: 256, dy: 1.7229451609195403e-4, Z0: 0.1 },
    scene: {
      points: [
        { xyz: [0, -0.0112, 0.004], re: 1, im: 0 },
        { xyz: [0, 0.0, 0.004], re: 1, im: 0 },
        { xyz: [0, 0.0112, -0.004], re: 1, im: 0 },
      ],
    },
    grid: {
      y: { min: -12e-3, max: 12e-3, count: 121 },
      z: { min: -15e-3, max: 15e-3, count: 121 },
    },
    algo: 'rma-linear',
  },
};

export const PNG_BYTES = new Uint8Array([
  0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 0, 0, 0, 0,
]);

export interface MockService {
  fetch: typeof fetch;
  log: string[];
  jobPollsUntilDone: number;
  resolution: { predicted: Record<string, number> };
}

/** fetch stub implementing presets / jobs / metrics; records every call. */
export function mockService(overrides: Partial<MockService> = {}): MockService {
  const svc: MockService = {
    log: [],
    jobPollsUntilDone: 2,
    resolution: {
      predicted: { dy: 0.784e-3, dz: 14.990e-3 },
    },
    fetch: undefined as unknown as typeof fetch,
    ...overrides,
  };
  let polls = 0;
  let jobCounter = 0;

  const json = (body: unknown, status = 200) =>
    new Response(JSON.stringify(body), {
      status,
      headers: { 'content-type': 'application/json' },
    });

  svc.fetch = (async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    svc.log.push(`${init?.method ?? 'GET'} ${url}`);
    if (url.includes('/api/v1/presets')) {
      return json([FIG5D]);
    }
    if (url.includes('/api/v1/metrics/resolution')) {
      return json({ predicted: svc.resolution.predicted, measured: {}, config: {} });
    }
    if (url.endsWith('/api/v1/jobs') && init?.method === 'POST') {
      const req = JSON.parse(String(init.body));
      if (!req.config.aperture) {
        return json({ detail: { message: 'missing aperture', field: 'aperture' } }, 400);
      }
      jobCounter += 1;
      polls = 0;
      const job: Job = {
        id: `job-${jobCounter}`, type: req.type, status: 'queued',
        progress: 0, config_hash: 'h', result: null, error: null, cached: false,
      };
      return json(job, 202);
    }
    const imageMatch = /\/api\/v1\/jobs\/([\w-]+)\/image/.exec(url);
    if (imageMatch) {
      return new Response(PNG_BYTES, {
        status: 200, headers: { 'content-type': 'image/png' },
      });
    }
    const jobMatch = /\/api\/v1\/jobs\/([\w-]+)$/.exec(url);
    if (jobMatch) {
      polls += 1;
      const finished = polls >= svc.jobPollsUntilDone;
      const job: Job = {
        id: jobMatch[1], type: 'pipeline',
        status: finished ? 'done' : 'running',
        progress: finished ? 1 : polls / (svc.jobPollsUntilDone + 1),
        config_hash: 'h', result: finished ? '/res.sarb' : null,
        error: null, cached: false,
      };
      return json(job);
    }
    return json({ detail: 'not found' }, 404);
  }) as typeof fetch;
  return svc;
}
