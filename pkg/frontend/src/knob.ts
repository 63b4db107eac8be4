// Vertical-drag knob. Dragging streams set_param at no more than
// MAX_SEND_RATE messages per second; releasing always sends the final
// value; double-click resets to the registry default.

import { formatNatural, toNatural, toNormalized } from './protocol.js';
import type { UiParam } from './params.js';

export const MAX_SEND_RATE = 30; // messages per second while dragging
const DRAG_RANGE_PX = 160; // full travel

// one shared window listener set routes drags to whichever knob is active,
// so rebuilding the panel never piles up stale listeners
let activeKnob: Knob | null = null;
let windowHooked = false;

function hookWindow(): void {
  if (windowHooked) return;
  windowHooked = true;
  window.addEventListener('mousemove', (ev) => activeKnob?.dragTo(ev.clientY));
  window.addEventListener('touchmove', (ev) => {
    if (activeKnob && ev.touches.length) activeKnob.dragTo(ev.touches[0].clientY);
  });
  window.addEventListener('mouseup', () => activeKnob?.release());
  window.addEventListener('touchend', () => activeKnob?.release());
}

export class Knob {
  readonly el: HTMLElement;
  private readonly fill: HTMLElement;
  private readonly readout: HTMLElement;
  private dragging = false;
  private dragStartY = 0;
  private dragStartValue = 0;
  private lastSendAt = -Infinity;
  private lastSentValue: number | null = null;
  enabled = true;

  constructor(
    readonly param: UiParam,
    private readonly sendValue: (id: string, value: number) => void,
    private readonly now: () => number = () =>
      typeof performance !== 'undefined' ? performance.now() : Date.now(),
  ) {
    const d = param.snapshot;
    this.el = document.createElement('div');
    this.el.className = 'knob';
    this.el.dataset.param = d.id;
    const label = document.createElement('div');
    label.className = 'knob-label';
    label.textContent = d.name;
    const track = document.createElement('div');
    track.className = 'knob-track';
    this.fill = document.createElement('div');
    this.fill.className = 'knob-fill';
    track.appendChild(this.fill);
    this.readout = document.createElement('div');
    this.readout.className = 'knob-readout';
    this.el.append(label, track, this.readout);
    this.display(param.value);

    hookWindow();
    this.el.addEventListener('mousedown', (ev) => this.beginDrag(ev.clientY));
    this.el.addEventListener(
      'touchstart',
      (ev) => {
        ev.preventDefault();
        this.beginDrag(ev.touches[0].clientY);
      },
      { passive: false },
    );
    this.el.addEventListener('dblclick', () => this.resetToDefault());
  }

  private beginDrag(y: number): void {
    if (!this.enabled) return;
    this.dragging = true;
    activeKnob = this;
    this.dragStartY = y;
    this.dragStartValue = this.param.value;
    this.el.classList.add('dragging');
  }

  dragTo(y: number): void {
    if (!this.dragging) return;
    const delta = (this.dragStartY - y) / DRAG_RANGE_PX;
    const value = Math.min(Math.max(this.dragStartValue + delta, 0), 1);
    this.edit(value, false);
  }

  release(): void {
    if (!this.dragging) return;
    this.dragging = false;
    if (activeKnob === this) activeKnob = null;
    this.el.classList.remove('dragging');
    this.edit(this.param.value, true);
  }

  private resetToDefault(): void {
    if (!this.enabled) return;
    const d = this.param.snapshot;
    this.edit(toNormalized(d, d.default), true);
  }

  /** Throttled send; `force` bypasses the rate limit (release/reset). */
  private edit(value: number, force: boolean): void {
    this.param.value = value;
    this.display(value);
    const t = this.now();
    const interval = 1000 / MAX_SEND_RATE;
    if (!force && t - this.lastSendAt < interval) return;
    if (!force && this.lastSentValue === value) return;
    this.lastSendAt = t;
    this.lastSentValue = value;
    this.sendValue(this.param.snapshot.id, value);
  }

  /** Server echo accepted by the store: update the face. */
  refresh(): void {
    this.display(this.param.value);
  }

  setEnabled(enabled: boolean): void {
    this.enabled = enabled;
    this.el.classList.toggle('disabled', !enabled);
  }

  private display(value: number): void {
    const d = this.param.snapshot;
    this.fill.style.width = `${(value * 100).toFixed(1)}%`;
    this.readout.textContent = formatNatural(d, toNatural(d, value));
  }
}
