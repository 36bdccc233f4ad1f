/** Five-step prototyping wizard: waveform -> array -> geometry -> target ->
 * reconstruct.  Users iterate by jumping back to any validated step; every
 * displayed metric comes from a service response. */

import { ApiClient, ApiError } from './api';
import { LiveMetrics } from './metrics';
import { pollJob, PollCancelled, PollHandle } from './poll';
import {
  STEPS, StepId, WizardState, allValid, applyPreset, buildConfig, canEnter,
  metricsQuery, validateStep,
} from './state';
import { Store } from './store';
import type { Preset, ResolutionReport } from './types';
import { renderViewer } from './viewer';

const STEP_TITLES: Record<StepId, string> = {
  waveform: 'Waveform',
  array: 'Antenna array',
  geometry: 'Scan geometry',
  target: 'Target scene',
  reconstruct: 'Reconstruction',
};

const MM = (v: number) => `${(v * 1e3).toFixed(3)} mm`;

export class Wizard {
  store: Store;
  client: ApiClient;
  root: HTMLElement;
  metrics: LiveMetrics;
  activePoll: PollHandle | null = null;
  lastReport: ResolutionReport | null = null;
  presets: Preset[] = [];

  constructor(root: HTMLElement, store: Store, client: ApiClient, debounceMs = 300) {
    this.root = root;
    this.store = store;
    this.client = client;
    this.metrics = new LiveMetrics(client, (report, error) => {
      this.lastReport = report;
      this.renderMetrics(report, error);
    }, debounceMs);
    root.innerHTML = `
      <nav class="wizard-nav" data-nav></nav>
      <section class="wizard-body">
        <div data-step-form></div>
        <div class="metrics" data-metrics hidden></div>
        <div class="run-panel" data-run-panel hidden></div>
        <div class="result-panel" data-result></div>
      </section>
      <aside class="gallery" data-gallery></aside>`;
    store.subscribe(() => this.render());
    this.render();
  }

  // -- rendering ------------------------------------------------------------

  render(): void {
    this.renderNav();
    this.renderStepForm();
    this.refreshMetrics();
  }

  private renderNav(): void {
    const nav = this.root.querySelector('[data-nav]') as HTMLElement;
    const state = this.store.get();
    nav.innerHTML = '';
    STEPS.forEach((step, i) => {
      const btn = document.createElement('button');
      btn.textContent = `${i + 1}. ${STEP_TITLES[step]}`;
      btn.dataset.step = step;
      const enterable = canEnter(state, step);
      btn.disabled = !enterable;
      if (state.step === step) btn.classList.add('active');
      btn.addEventListener('click', () => {
        if (canEnter(this.store.get(), step)) {
          this.store.patch((d) => { d.step = step; });
        }
      });
      nav.appendChild(btn);
    });
  }

  private renderStepForm(): void {
    const host = this.root.querySelector('[data-step-form]') as HTMLElement;
    const state = this.store.get();
    const step = state.step;
    host.innerHTML = `<h2>${STEP_TITLES[step]}</h2>`;
    const form = document.createElement('div');
    form.className = 'form';
    if (step === 'waveform') this.waveformForm(form, state);
    else if (step === 'array') this.arrayForm(form, state);
    else if (step === 'geometry') this.geometryForm(form, state);
    else if (step === 'target') this.targetForm(form, state);
    else this.reconstructForm(form, state);
    host.appendChild(form);

    const errors = validateStep(state, step);
    const errBox = document.createElement('ul');
    errBox.className = 'errors';
    errBox.dataset.errors = '';
    for (const e of errors) {
      const li = document.createElement('li');
      li.dataset.field = e.field;
      li.textContent = `${e.field}: ${e.message}`;
      errBox.appendChild(li);
    }
    host.appendChild(errBox);

    const controls = document.createElement('div');
    controls.className = 'step-controls';
    const idx = STEPS.indexOf(step);
    if (idx > 0) {
      const back = document.createElement('button');
      back.textContent = 'Back';
      back.dataset.back = '';
      back.addEventListener('click', () =>
        this.store.patch((d) => { d.step = STEPS[idx - 1]; }));
      controls.appendChild(back);
    }
    if (idx < STEPS.length - 1) {
      const next = document.createElement('button');
      next.textContent = 'Next';
      next.dataset.next = '';
      next.disabled = errors.length > 0;
      next.addEventListener('click', () =>
        this.store.patch((d) => { d.step = STEPS[idx + 1]; }));
      controls.appendChild(next);
    }
    host.appendChild(controls);

    const runPanel = this.root.querySelector('[data-run-panel]') as HTMLElement;
    runPanel.hidden = step !== 'reconstruct';
    if (step === 'reconstruct') this.renderRunPanel(runPanel, state);
  }

  private numberField(
    form: HTMLElement, label: string, field: string, value: number,
    apply: (draft: WizardState, v: number) => void, scale = 1,
  ): void {
    const wrap = document.createElement('label');
    wrap.textContent = label;
    const input = document.createElement('input');
    input.type = 'number';
    input.step = 'any';
    input.dataset.field = field;
    input.value = String(value / scale);
    input.addEventListener('change', () => {
      const v = Number(input.value) * scale;
      this.store.patch((d) => apply(d, v));
    });
    wrap.appendChild(input);
    form.appendChild(wrap);
  }

  private selectField(
    form: HTMLElement, label: string, field: string, value: string,
    options: string[], apply: (draft: WizardState, v: string) => void,
  ): void {
    const wrap = document.createElement('label');
    wrap.textContent = label;
    const sel = document.createElement('select');
    sel.dataset.field = field;
    for (const opt of options) {
      const o = document.createElement('option');
      o.value = opt;
      o.textContent = opt;
      if (opt === value) o.selected = true;
      sel.appendChild(o);
    }
    sel.addEventListener('change', () => {
      this.store.patch((d) => apply(d, sel.value));
    });
    wrap.appendChild(sel);
    form.appendChild(wrap);
  }

  private waveformForm(form: HTMLElement, state: WizardState): void {
    const w = state.waveform;
    this.selectField(form, 'modulation', 'type', w.type,
      ['fmcw', 'pmcw', 'ofdm'], (d, v) => { d.waveform.type = v as typeof w.type; });
    this.numberField(form, w.type === 'fmcw' ? 'sweep start [GHz]' : 'carrier [GHz]',
      'f0', w.f0, (d, v) => { d.waveform.f0 = v; }, 1e9);
    this.numberField(form, 'bandwidth [GHz]', 'bandwidth', w.bandwidth,
      (d, v) => { d.waveform.bandwidth = v; }, 1e9);
    this.numberField(form, 'frequency samples', 'nf', w.nf,
      (d, v) => { d.waveform.nf = Math.round(v); });
  }

  private arrayForm(form: HTMLElement, state: WizardState): void {
    const a = state.array;
    this.numberField(form, 'elements (scan axis)', 'n1', a.n1,
      (d, v) => { d.array.n1 = Math.round(v); });
    this.numberField(form, 'elements (second axis)', 'n2', a.n2,
      (d, v) => { d.array.n2 = Math.round(v); });
    this.numberField(form, 'element spacing [mm]', 'spacing', a.spacing,
      (d, v) => { d.array.spacing = v; }, 1e-3);
  }

  private geometryForm(form: HTMLElement, state: WizardState): void {
    const g = state.geometry;
    this.selectField(form, 'scan pattern', 'kind', g.kind,
      ['linear', 'planar', 'circular', 'cylindrical'], (d, v) => {
        d.geometry.kind = v as typeof g.kind;
        d.reconstruct.algo = `rma-${v}` as WizardState['reconstruct']['algo'];
      });
    this.numberField(form,
      g.kind === 'circular' || g.kind === 'cylindrical'
        ? 'scan radius R0 [mm]' : 'standoff Z0 [mm]',
      'standoff', g.standoff, (d, v) => { d.geometry.standoff = v; }, 1e-3);
  }

  private targetForm(form: HTMLElement, state: WizardState): void {
    const t = state.target;
    const list = document.createElement('div');
    list.dataset.points = '';
    t.points.forEach((p, i) => {
      const row = document.createElement('div');
      row.className = 'point-row';
      row.textContent = `(${MM(p.x)}, ${MM(p.y)}, ${MM(p.z)})  ${p.re}${p.im >= 0 ? '+' : ''}${p.im}j`;
      const del = document.createElement('button');
      del.textContent = 'remove';
      del.dataset.removePoint = String(i);
      del.addEventListener('click', () =>
        this.store.patch((d) => { d.target.points.splice(i, 1); }));
      row.appendChild(del);
      list.appendChild(row);
    });
    form.appendChild(list);

    const add = document.createElement('button');
    add.textContent = 'add point scatterer';
    add.dataset.addPoint = '';
    add.addEventListener('click', () =>
      this.store.patch((d) => {
        d.target.points.push({ x: 0, y: 0, z: 0, re: 1, im: 0 });
      }));
    form.appendChild(add);

    this.selectField(form, 'solid target mesh', 'mesh', t.mesh || '(none)',
      ['(none)', 'knife'], (d, v) => {
        d.target.mesh = v === '(none)' ? '' : (v as 'knife');
      });
    if (t.mesh !== '') {
      this.numberField(form, 'surface sampling [mm]', 'meshSpacing',
        t.meshSpacing, (d, v) => { d.target.meshSpacing = v; }, 1e-3);
      this.numberField(form, 'mesh length [mm]', 'meshLength',
        t.meshLength, (d, v) => { d.target.meshLength = v; }, 1e-3);
    }
  }

  private reconstructForm(form: HTMLElement, state: WizardState): void {
    const r = state.reconstruct;
    this.selectField(form, 'algorithm', 'algo', r.algo,
      ['bpa', 'rma-linear', 'rma-planar', 'rma-circular', 'rma-cylindrical'],
      (d, v) => { d.reconstruct.algo = v as typeof r.algo; });
    for (const axis of ['x', 'y', 'z'] as const) {
      const block = r.grid[axis];
      if (!block) continue;
      this.numberField(form, `grid ${axis} min [mm]`, `grid.${axis}.min`,
        block.min, (d, v) => { d.reconstruct.grid[axis]!.min = v; }, 1e-3);
      this.numberField(form, `grid ${axis} max [mm]`, `grid.${axis}.max`,
        block.max, (d, v) => { d.reconstruct.grid[axis]!.max = v; }, 1e-3);
    }
  }

  // -- live metrics -----------------------------------------------------------

  refreshMetrics(): void {
    const state = this.store.get();
    const panel = this.root.querySelector('[data-metrics]') as HTMLElement;
    const ready = validateStep(state, 'waveform').length === 0
      && validateStep(state, 'geometry').length === 0;
    panel.hidden = !ready;
    if (ready) this.metrics.update(metricsQuery(state));
    else this.metrics.cancel();
  }

  renderMetrics(report: ResolutionReport | null, error: string | null): void {
    const panel = this.root.querySelector('[data-metrics]') as HTMLElement;
    if (error) {
      panel.innerHTML = `<span class="error" data-metrics-error>${error}</span>`;
      return;
    }
    if (!report) return;
    const rows = Object.entries(report.predicted)
      .map(([key, v]) => `<div><span>${key}</span><b data-metric="${key}">${MM(v)}</b></div>`)
      .join('');
    panel.innerHTML = `<h3>predicted resolution</h3>${rows}`;
  }

  // -- job execution ----------------------------------------------------------

  private renderRunPanel(panel: HTMLElement, state: WizardState): void {
    panel.innerHTML = '';
    const run = document.createElement('button');
    run.textContent = 'Run reconstruction';
    run.dataset.run = '';
    run.disabled = !allValid(state);
    run.addEventListener('click', () => void this.runPipeline());
    panel.appendChild(run);
    const progress = document.createElement('progress');
    progress.max = 1;
    progress.value = 0;
    progress.dataset.progress = '';
    progress.hidden = true;
    panel.appendChild(progress);
    const banner = document.createElement('div');
    banner.className = 'error-banner';
    banner.dataset.banner = '';
    banner.hidden = true;
    panel.appendChild(banner);
  }

  async runPipeline(): Promise<void> {
    const state = this.store.get();
    if (!allValid(state)) return;
    const panel = this.root.querySelector('[data-run-panel]') as HTMLElement;
    const progress = panel.querySelector('[data-progress]') as HTMLProgressElement;
    const banner = panel.querySelector('[data-banner]') as HTMLElement;
    banner.hidden = true;
    this.activePoll?.cancel();
    try {
      const job = await this.client.submitJob('pipeline', buildConfig(state));
      this.store.patch((d) => { d.activeJobId = job.id; });
      progress.hidden = false;
      this.activePoll = pollJob(this.client, job.id, (j) => {
        progress.value = j.progress;
      });
      const final = await this.activePoll.done;
      this.activePoll = null;
      progress.hidden = true;
      if (final.status === 'failed') {
        this.showError(banner, final.error ?? 'job failed');
        return;
      }
      this.store.patch((d) => {
        d.activeJobId = null;
        d.lastResult = {
          jobId: final.id, cached: final.cached, algo: d.reconstruct.algo,
        };
      });
      this.showResult(final.id, final.cached);
    } catch (err) {
      this.activePoll = null;
      progress.hidden = true;
      if (err instanceof PollCancelled) return;
      const msg = err instanceof ApiError && err.field
        ? `${err.message} (field ${err.field})` : String(err);
      this.showError(banner, msg);
    }
  }

  private showError(banner: HTMLElement, message: string): void {
    banner.hidden = false;
    banner.innerHTML = '';
    banner.appendChild(document.createTextNode(message));
    const retry = document.createElement('button');
    retry.textContent = 'retry';
    retry.dataset.retry = '';
    retry.addEventListener('click', () => void this.runPipeline());
    banner.appendChild(retry);
  }

  showResult(jobId: string, cached: boolean): void {
    const host = this.root.querySelector('[data-result]') as HTMLElement;
    const is3d = this.store.get().reconstruct.algo === 'rma-planar'
      || this.store.get().reconstruct.algo === 'rma-cylindrical'
      || Object.keys(this.store.get().reconstruct.grid).length === 3;
    renderViewer(host, this.client, jobId, cached, is3d);
    const tweak = document.createElement('button');
    tweak.textContent = 'duplicate & tweak';
    tweak.dataset.tweak = '';
    tweak.addEventListener('click', () =>
      this.store.patch((d) => { d.step = 'waveform'; }));
    host.appendChild(tweak);
  }

  // -- presets ----------------------------------------------------------------

  async loadPresets(): Promise<void> {
    const host = this.root.querySelector('[data-gallery]') as HTMLElement;
    try {
      this.presets = await this.client.presets();
    } catch {
      host.innerHTML = '<div class="offline" data-offline>service unreachable'
        + ' - presets unavailable</div>';
      return;
    }
    host.innerHTML = '<h3>presets</h3>';
    for (const preset of this.presets) {
      const btn = document.createElement('button');
      btn.dataset.preset = preset.id;
      btn.title = preset.description;
      btn.textContent = preset.name;
      btn.addEventListener('click', () => this.selectPreset(preset.id));
      host.appendChild(btn);
    }
  }

  selectPreset(id: string): boolean {
    const preset = this.presets.find((p) => p.id === id);
    if (!preset) return false;
    this.store.set(applyPreset(this.store.get(), preset));
    return true;
  }

  dispose(): void {
    this.activePoll?.cancel();
    this.metrics.cancel();
  }
}
