// Virtual keyboard for the polysynth: mouse/touch on drawn keys plus the
// usual computer-keyboard rows. Held notes are tracked so a reconnect (or
// leaving the page) can flush note-offs for everything still down.

import type { ClientMessage } from './protocol.js';

const KEY_ROWS: Record<string, number> = {
  z: 0, s: 1, x: 2, d: 3, c: 4, v: 5, g: 6, b: 7, h: 8, n: 9, j: 10, m: 11,
  q: 12, '2': 13, w: 14, '3': 15, e: 16, r: 17, '5': 18, t: 19, '6': 20,
  y: 21, '7': 22, u: 23, i: 24,
};
const BLACK = new Set([1, 3, 6, 8, 10]);

export class Keyboard {
  readonly el: HTMLElement;
  readonly held = new Set<number>();
  enabled = true;
  velocity = 0.8;

  constructor(
    private readonly send: (msg: ClientMessage) => boolean,
    readonly baseNote = 48,
    readonly octaves = 2,
  ) {
    this.el = document.createElement('div');
    this.el.className = 'keyboard';
    for (let i = 0; i <= this.octaves * 12; i++) {
      const note = this.baseNote + i;
      const key = document.createElement('div');
      key.className = BLACK.has(i % 12) ? 'key black' : 'key white';
      key.dataset.note = String(note);
      key.addEventListener('mousedown', (ev) => {
        ev.preventDefault();
        this.noteOn(note);
      });
      key.addEventListener('mouseup', () => this.noteOff(note));
      key.addEventListener('mouseleave', () => this.noteOff(note));
      key.addEventListener(
        'touchstart',
        (ev) => {
          ev.preventDefault();
          this.noteOn(note);
        },
        { passive: false },
      );
      key.addEventListener('touchend', () => this.noteOff(note));
      this.el.appendChild(key);
    }
  }

  attachComputerKeys(target: GlobalEventHandlers = window): void {
    target.addEventListener('keydown', (ev: KeyboardEvent) => {
      if (ev.repeat) return;
      const offset = KEY_ROWS[ev.key.toLowerCase()];
      if (offset !== undefined) this.noteOn(this.baseNote + offset);
    });
    target.addEventListener('keyup', (ev: KeyboardEvent) => {
      const offset = KEY_ROWS[ev.key.toLowerCase()];
      if (offset !== undefined) this.noteOff(this.baseNote + offset);
    });
  }

  noteOn(note: number): void {
    if (!this.enabled || this.held.has(note)) return;
    if (this.send({ type: 'note_on', note, velocity: this.velocity })) {
      this.held.add(note);
      this.mark(note, true);
    }
  }

  noteOff(note: number): void {
    if (!this.held.has(note)) return;
    this.held.delete(note);
    this.mark(note, false);
    this.send({ type: 'note_off', note });
  }

  /** Send note-off for everything still held (disconnect/page hide). */
  flushAll(): void {
    for (const note of Array.from(this.held)) this.noteOff(note);
  }

  /** Notes held when the link dropped; release them after reconnecting. */
  releaseStaleAfterReconnect(): void {
    for (const note of Array.from(this.held)) {
      this.held.delete(note);
      this.mark(note, false);
      this.send({ type: 'note_off', note });
    }
  }

  setEnabled(enabled: boolean): void {
    this.enabled = enabled;
    this.el.classList.toggle('disabled', !enabled);
  }

  private mark(note: number, down: boolean): void {
    const key = this.el.querySelector<HTMLElement>(`[data-note="${note}"]`);
    key?.classList.toggle('down', down);
  }
}
