/** Wizard state: five step forms, validation gating, and (de)serialization.
 *
 * Forms hold raw SI values exactly as they travel to the service; the UI
 * layer owns display formatting.  The state is fully serializable to the
 * URL hash and localStorage so a session survives reload and sharing.
 */

import type {
  Algorithm, ApertureConfig, GridConfig, PipelineConfig, Preset, WaveformConfig,
} from './types';

export const STEPS = ['waveform', 'array', 'geometry', 'target', 'reconstruct'] as const;
export type StepId = (typeof STEPS)[number];

export interface WaveformForm {
  type: 'fmcw' | 'pmcw' | 'ofdm';
  f0: number;        // sweep start [Hz] (fmcw) or carrier [Hz] (pmcw/ofdm)
  bandwidth: number; // [Hz]
  nf: number;        // frequency samples
}

export interface ArrayForm {
  n1: number;       // elements along the scan axis (theta for polar kinds)
  n2: number;       // second axis (planar y / cylindrical height)
  spacing: number;  // element spacing [m]
}

export interface GeometryForm {
  kind: 'linear' | 'planar' | 'circular' | 'cylindrical';
  standoff: number; // Z0 (rectilinear) or R0 (polar) [m]
}

export interface TargetPoint {
  x: number;
  y: number;
  z: number;
  re: number;
  im: number;
}

export interface TargetForm {
  points: TargetPoint[];
  mesh: '' | 'knife';
  meshSpacing: number; // [m]
  meshLength: number;  // [m]
}

export interface ReconstructForm {
  algo: Algorithm;
  grid: GridConfig;
}

export interface WizardState {
  step: StepId;
  waveform: WaveformForm;
  array: ArrayForm;
  geometry: GeometryForm;
  target: TargetForm;
  reconstruct: ReconstructForm;
  activeJobId: string | null;
  lastResult: { jobId: string; cached: boolean; algo: Algorithm } | null;
}

export function defaultState(): WizardState {
  return {
    step: 'waveform',
    waveform: { type: 'fmcw', f0: 430e9, bandwidth: 10e9, nf: 64 },
    array: { n1: 128, n2: 1, spacing: 1.7229e-4 },
    geometry: { kind: 'linear', standoff: 0.1 },
    target: {
      points: [{ x: 0, y: 1e-3, z: 2e-3, re: 1, im: 0 }],
      mesh: '',
      meshSpacing: 8e-4,
      meshLength: 0.016,
    },
    reconstruct: {
      algo: 'rma-linear',
      grid: {
        y: { min: -6e-3, max: 6e-3, count: 121 },
        z: { min: -15e-3, max: 15e-3, count: 121 },
      },
    },
    activeJobId: null,
    lastResult: null,
  };
}

export interface FieldError {
  step: StepId;
  field: string;
  message: string;
}

const positive = (v: number) => Number.isFinite(v) && v > 0;

export function validateStep(state: WizardState, step: StepId): FieldError[] {
  const errors: FieldError[] = [];
  const err = (field: string, message: string) => errors.push({ step, field, message });
  if (step === 'waveform') {
    const w = state.waveform;
    if (!positive(w.f0)) err('f0', 'start/carrier frequency must be positive');
    if (!positive(w.bandwidth)) err('bandwidth', 'bandwidth must be positive');
    if (!Number.isInteger(w.nf) || w.nf < 2) err('nf', 'need at least 2 frequency samples');
  } else if (step === 'array') {
    const a = state.array;
    if (!Number.isInteger(a.n1) || a.n1 < 1) err('n1', 'element count must be >= 1');
    if (!Number.isInteger(a.n2) || a.n2 < 1) err('n2', 'element count must be >= 1');
    if (!positive(a.spacing)) err('spacing', 'spacing must be positive');
  } else if (step === 'geometry') {
    if (!positive(state.geometry.standoff)) err('standoff', 'standoff must be positive');
    const kind = state.geometry.kind;
    if ((kind === 'planar' || kind === 'cylindrical') && state.array.n2 < 2) {
      err('kind', `${kind} scanning needs a second array axis (n2 >= 2)`);
    }
  } else if (step === 'target') {
    const t = state.target;
    if (t.points.length === 0 && t.mesh === '') {
      err('points', 'add at least one scatterer or a mesh');
    }
    if (t.mesh !== '' && !positive(t.meshSpacing)) {
      err('meshSpacing', 'mesh sampling spacing must be positive');
    }
    for (const p of t.points) {
      if (![p.x, p.y, p.z, p.re, p.im].every(Number.isFinite)) {
        err('points', 'scatterer fields must be finite numbers');
        break;
      }
    }
  } else {
    const r = state.reconstruct;
    const axes = Object.entries(r.grid).filter(([, v]) => v != null);
    if (axes.length < 2) err('grid', 'grid needs at least two axes');
    for (const [name, axis] of axes) {
      if (!axis) continue;
      if (!(axis.max > axis.min)) err(`grid.${name}`, `${name}: max must exceed min`);
      if (axis.count !== undefined && (!Number.isInteger(axis.count) || axis.count < 2)) {
        err(`grid.${name}`, `${name}: count must be >= 2`);
      }
    }
    if (!algoMatchesKind(r.algo, state.geometry.kind)) {
      err('algo', `${r.algo} does not apply to a ${state.geometry.kind} scan`);
    }
  }
  return errors;
}

export function algoMatchesKind(algo: Algorithm, kind: GeometryForm['kind']): boolean {
  if (algo === 'bpa') return true;
  return algo === `rma-${kind}`;
}

/** A step is enterable only when every prior step validates. */
export function canEnter(state: WizardState, step: StepId): boolean {
  for (const prior of STEPS) {
    if (prior === step) return true;
    if (validateStep(state, prior).length > 0) return false;
  }
  return true;
}

export function allValid(state: WizardState): boolean {
  return STEPS.every((s) => validateStep(state, s).length === 0);
}

/** Assemble the service pipeline config from the step forms. */
export function buildConfig(state: WizardState): PipelineConfig {
  const w = state.waveform;
  const waveform: WaveformConfig =
    w.type === 'fmcw'
      ? { type: 'fmcw' as const, f0: w.f0, K: w.bandwidth / 1e-4, Tc: 1e-4, Tr: 1.2e-4, Nc: 1, fS: 2e6, Nf: w.nf }
      : w.type === 'pmcw'
        ? { type: 'pmcw' as const, fc: w.f0, B: w.bandwidth, Td: 1e-6, Ncode: 1, Nf: w.nf }
        : { type: 'ofdm' as const, fc: w.f0, Nsc: w.nf, df: w.bandwidth / w.nf, Tcp: 2e-6, Nsym: 1, Tr: 1.2e-4 };

  const { kind, standoff } = state.geometry;
  const { n1, n2, spacing } = state.array;
  const aperture: ApertureConfig =
    kind === 'linear'
      ? { kind, Ny: n1, dy: spacing, Z0: standoff }
      : kind === 'planar'
        ? { kind, Nx: n1, Ny: n2, dx: spacing, dy: spacing, Z0: standoff }
        : kind === 'circular'
          ? { kind, Ntheta: n1, R0: standoff }
          : { kind, Ntheta: n1, Ny: n2, dy: spacing, R0: standoff };

  const scene: PipelineConfig['scene'] = {};
  if (state.target.points.length > 0) {
    scene.points = state.target.points.map((p) => ({
      xyz: [p.x, p.y, p.z] as [number, number, number],
      re: p.re,
      im: p.im,
    }));
  }
  if (state.target.mesh !== '') {
    scene.meshes = [{
      builtin: state.target.mesh,
      spacing: state.target.meshSpacing,
      length: state.target.meshLength,
    }];
  }

  return {
    waveform,
    aperture,
    scene,
    grid: state.reconstruct.grid,
    algo: state.reconstruct.algo,
  };
}

/** Populate every step from a service preset config (inverse of buildConfig). */
export function applyPreset(state: WizardState, preset: Preset): WizardState {
  const cfg = preset.config;
  const next = structuredClone(state);
  const w = cfg.waveform;
  if (w.type === 'fmcw') {
    const bandwidth = (w.K as number) * (w.Tc as number);
    next.waveform = { type: 'fmcw', f0: w.f0 as number, bandwidth, nf: w.Nf as number };
  } else if (w.type === 'pmcw') {
    next.waveform = { type: 'pmcw', f0: w.fc as number, bandwidth: w.B as number, nf: w.Nf as number };
  } else {
    const bandwidth = (w.Nsc as number) * (w.df as number);
    next.waveform = { type: 'ofdm', f0: w.fc as number, bandwidth, nf: w.Nsc as number };
  }
  const a = cfg.aperture;
  if (a.kind === 'linear') {
    next.array = { n1: a.Ny as number, n2: 1, spacing: a.dy as number };
    next.geometry = { kind: 'linear', standoff: a.Z0 as number };
  } else if (a.kind === 'planar') {
    next.array = { n1: a.Nx as number, n2: a.Ny as number, spacing: a.dx as number };
    next.geometry = { kind: 'planar', standoff: a.Z0 as number };
  } else if (a.kind === 'circular') {
    next.array = { n1: a.Ntheta as number, n2: 1, spacing: 0.001 };
    next.geometry = { kind: 'circular', standoff: a.R0 as number };
  } else if (a.kind === 'cylindrical') {
    next.array = { n1: a.Ntheta as number, n2: a.Ny as number, spacing: a.dy as number };
    next.geometry = { kind: 'cylindrical', standoff: a.R0 as number };
  }
  next.target = {
    points: (cfg.scene.points ?? []).map((p) => ({
      x: p.xyz[0], y: p.xyz[1], z: p.xyz[2], re: p.re ?? 1, im: p.im ?? 0,
    })),
    mesh: (cfg.scene.meshes?.[0]?.builtin as '' | 'knife') ?? '',
    meshSpacing: cfg.scene.meshes?.[0]?.spacing ?? 8e-4,
    meshLength: cfg.scene.meshes?.[0]?.length ?? 0.016,
  };
  next.reconstruct = { algo: cfg.algo, grid: cfg.grid };
  next.step = 'waveform';
  next.activeJobId = null;
  return next;
}

// --- persistence -----------------------------------------------------------

const STORAGE_KEY = 'sarlab-wizard-state';

export function serializeState(state: WizardState): string {
  const json = JSON.stringify(state);
  // base64url keeps the hash free of separators
  return btoa(unescape(encodeURIComponent(json)))
    .replace(/\+/g, '-').replace(/\//g, '_').replace(/=+$/, '');
}

export function deserializeState(encoded: string): WizardState | null {
  try {
    const b64 = encoded.replace(/-/g, '+').replace(/_/g, '/');
    const json = decodeURIComponent(escape(atob(b64)));
    const parsed = JSON.parse(json);
    if (!parsed || !STEPS.includes(parsed.step)) return null;
    // merge over defaults so older serializations stay loadable
    return { ...defaultState(), ...parsed };
  } catch {
    return null;
  }
}

export function stateToUrlHash(state: WizardState): string {
  return `#s=${serializeState(state)}`;
}

export function stateFromUrlHash(hash: string): WizardState | null {
  const match = /^#s=([A-Za-z0-9_-]+)$/.exec(hash);
  return match ? deserializeState(match[1]) : null;
}

export function saveLocal(state: WizardState, storage: Storage = localStorage): void {
  storage.setItem(STORAGE_KEY, serializeState(state));
}

export function loadLocal(storage: Storage = localStorage): WizardState | null {
  const raw = storage.getItem(STORAGE_KEY);
  return raw ? deserializeState(raw) : null;
}

/** Query parameters for the live-metrics endpoint; numbers shown in the UI
 * come exclusively from the service response. */
export function metricsQuery(state: WizardState): Record<string, string | number> {
  const w = state.waveform;
  const fc = w.type === 'fmcw' ? w.f0 + w.bandwidth / 2 : w.f0;
  const kind = state.geometry.kind;
  if (kind === 'linear' || kind === 'planar') {
    const params: Record<string, string | number> = {
      geometry: kind,
      b: w.bandwidth,
      fc,
      zref: state.geometry.standoff,
      dy: (state.array.n1 - 1) * state.array.spacing,
    };
    if (kind === 'planar') {
      params.dx = (state.array.n1 - 1) * state.array.spacing;
      params.dy = (state.array.n2 - 1) * state.array.spacing;
    }
    return params;
  }
  return {
    geometry: kind,
    fmin: fc - w.bandwidth / 2,
    fmax: fc + w.bandwidth / 2,
    r0: state.geometry.standoff,
    dy: kind === 'cylindrical' ? (state.array.n2 - 1) * state.array.spacing : 0,
  };
}
