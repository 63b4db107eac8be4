// Client-side mirror of the parameter registry snapshot. A knob edit marks
// its parameter pending until the server echoes the value we sent last;
// older echoes racing a newer local edit are dropped (last writer wins).

import type { ParamSnapshot, StateEvent } from './protocol.js';

export interface UiParam {
  snapshot: ParamSnapshot;
  value: number; // normalized, what the UI shows
  pending: boolean;
  lastSent: number | null;
}

export class ParamStore {
  readonly params = new Map<string, UiParam>();
  engine = '';

  rebuild(state: StateEvent): void {
    this.engine = state.engine;
    this.params.clear();
    for (const snap of state.params) {
      this.params.set(snap.id, {
        snapshot: snap,
        value: snap.value,
        pending: false,
        lastSent: null,
      });
    }
  }

  get(id: string): UiParam | undefined {
    return this.params.get(id);
  }

  localEdit(id: string, value: number): void {
    const p = this.params.get(id);
    if (!p) return;
    p.value = value;
    p.pending = true;
    p.lastSent = value;
  }

  /** Apply a server echo. Returns true when the display should update. */
  confirm(id: string, value: number): boolean {
    const p = this.params.get(id);
    if (!p) return false;
    if (p.pending) {
      if (p.lastSent !== null && value === p.lastSent) {
        p.pending = false;
        p.value = value;
        return true;
      }
      return false; // stale echo from before our latest edit
    }
    p.value = value;
    return true;
  }
}
