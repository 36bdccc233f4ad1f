/** Result viewer: server-rendered PNG slices/MIPs with axis scrubbing and a
 * dB dynamic-range slider.  The client never rescales data values; only the
 * request parameters change. */

import type { ApiClient } from './api';

export interface ViewerOptions {
  mode: 'mip' | 'slice';
  axis: number;
  index: number;
  dr: number;
}

export function renderViewer(
  root: HTMLElement,
  client: ApiClient,
  jobId: string,
  cached: boolean,
  is3d: boolean,
): void {
  const opts: ViewerOptions = { mode: 'mip', axis: 0, index: 0, dr: 40 };
  root.innerHTML = `
    <div class="viewer">
      <div class="viewer-head">
        <span>result ${jobId.slice(0, 8)}</span>
        ${cached ? '<span class="badge" data-cached>cached result</span>' : ''}
      </div>
      <div class="viewer-controls" ${is3d ? '' : 'hidden'}>
        <label>view
          <select data-mode>
            <option value="mip">max projection</option>
            <option value="slice">slice</option>
          </select>
        </label>
        <label>axis
          <select data-axis>
            <option value="0">0</option><option value="1">1</option>
            <option value="2">2</option>
          </select>
        </label>
        <label>slice index <input data-index type="number" min="0" value="0"></label>
      </div>
      <label class="dr">dynamic range <span data-dr-label>40</span> dB
        <input data-dr type="range" min="10" max="80" step="5" value="40">
      </label>
      <img data-image alt="reconstructed image">
      <div class="viewer-error" data-viewer-error hidden></div>
    </div>`;

  const img = root.querySelector('[data-image]') as HTMLImageElement;
  const errBox = root.querySelector('[data-viewer-error]') as HTMLElement;

  const refresh = () => {
    img.src = client.imageUrl(jobId, opts);
    (root.querySelector('[data-dr-label]') as HTMLElement).textContent = String(opts.dr);
  };
  img.addEventListener('error', () => {
    errBox.hidden = false;
    errBox.textContent = 'image request failed (slice out of range?)';
  });
  img.addEventListener('load', () => {
    errBox.hidden = true;
  });

  (root.querySelector('[data-mode]') as HTMLSelectElement).addEventListener('change', (e) => {
    opts.mode = (e.target as HTMLSelectElement).value as 'mip' | 'slice';
    refresh();
  });
  (root.querySelector('[data-axis]') as HTMLSelectElement).addEventListener('change', (e) => {
    opts.axis = Number((e.target as HTMLSelectElement).value);
    refresh();
  });
  (root.querySelector('[data-index]') as HTMLInputElement).addEventListener('change', (e) => {
    opts.index = Number((e.target as HTMLInputElement).value);
    opts.mode = 'slice';
    (root.querySelector('[data-mode]') as HTMLSelectElement).value = 'slice';
    refresh();
  });
  (root.querySelector('[data-dr]') as HTMLInputElement).addEventListener('input', (e) => {
    opts.dr = Number((e.target as HTMLInputElement).value);
    refresh();
  });

  refresh();
}
