/** Minimal observable store for the wizard state. */

import type { WizardState } from './state';

export type Listener = (state: WizardState) => void;

export class Store {
  private state: WizardState;
  private listeners = new Set<Listener>();

  constructor(initial: WizardState) {
    this.state = initial;
  }

  get(): WizardState {
    return this.state;
  }

  set(next: WizardState): void {
    this.state = next;
    for (const fn of this.listeners) fn(this.state);
  }

  patch(mutate: (draft: WizardState) => void): void {
    const draft = structuredClone(this.state);
    mutate(draft);
    this.set(draft);
  }

  subscribe(fn: Listener): () => void {
    this.listeners.add(fn);
    return () => this.listeners.delete(fn);
  }
}
