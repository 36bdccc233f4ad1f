/** Entry point: restore state, mount the wizard, keep URL and storage in
 * sync.  #s=... hashes carry a full serialized state; #preset=<id> selects a
 * gallery preset (unknown ids fall back to a fresh step 1). */

import { ApiClient } from './api';
import {
  defaultState, loadLocal, saveLocal, stateFromUrlHash, stateToUrlHash,
} from './state';
import { Store } from './store';
import { Wizard } from './wizard';

export async function bootstrap(root: HTMLElement, base = ''): Promise<Wizard> {
  const client = new ApiClient(base);
  const fromUrl = stateFromUrlHash(window.location.hash);
  const initial = fromUrl ?? loadLocal() ?? defaultState();
  const store = new Store(initial);
  const wizard = new Wizard(root, store, client);

  store.subscribe((state) => {
    history.replaceState(null, '', stateToUrlHash(state));
    saveLocal(state);
  });

  await wizard.loadPresets();

  const presetMatch = /^#preset=([\w-]+)$/.exec(window.location.hash);
  if (presetMatch && !wizard.selectPreset(presetMatch[1])) {
    store.set(defaultState()); // unknown preset id: fresh wizard at step 1
  }
  return wizard;
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  void bootstrap(document.getElementById('app') as HTMLElement);
}
