/** Wire types mirroring the sarlab /api/v1 JSON contract. */

export interface Job {
  id: string;
  type: string;
  status: 'queued' | 'running' | 'done' | 'failed';
  progress: number;
  config_hash: string;
  result: string | null;
  error: string | null;
  cached: boolean;
}

export interface ResolutionReport {
  predicted: Record<string, number>;
  measured: Record<string, number>;
  config: Record<string, unknown>;
}

export interface Preset {
  id: string;
  name: string;
  description: string;
  config: PipelineConfig;
}

export interface WaveformConfig {
  type: 'fmcw' | 'pmcw' | 'ofdm';
  [key: string]: number | string;
}

export interface ApertureConfig {
  kind: 'linear' | 'planar' | 'circular' | 'cylindrical' | 'irregular';
  [key: string]: number | string | number[][];
}

export interface AxisConfig {
  min: number;
  max: number;
  count?: number;
}

export interface GridConfig {
  x?: AxisConfig;
  y?: AxisConfig;
  z?: AxisConfig;
}

export interface ScenePoint {
  xyz: [number, number, number];
  re?: number;
  im?: number;
}

export interface SceneMesh {
  builtin?: string;
  path?: string;
  spacing: number;
  length?: number;
  seed?: number;
}

export interface SceneConfig {
  points?: ScenePoint[];
  meshes?: SceneMesh[];
}

export type Algorithm =
  | 'bpa'
  | 'rma-linear'
  | 'rma-planar'
  | 'rma-circular'
  | 'rma-cylindrical';

export interface PipelineConfig {
  waveform: WaveformConfig;
  aperture: ApertureConfig;
  scene: SceneConfig;
  grid: GridConfig;
  algo: Algorithm;
  [key: string]: unknown;
}
