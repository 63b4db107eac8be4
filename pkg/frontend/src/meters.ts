// Stereo level meters fed only by server meter events (dBFS).

import type { MeterEvent } from './protocol.js';

const FLOOR_DB = -60;

export class Meters {
  readonly el: HTMLElement;
  private bars: HTMLElement[] = [];
  private labels: HTMLElement[] = [];

  constructor() {
    this.el = document.createElement('div');
    this.el.className = 'meters';
    for (const name of ['L', 'R']) {
      const row = document.createElement('div');
      row.className = 'meter-row';
      const tag = document.createElement('span');
      tag.textContent = name;
      const track = document.createElement('div');
      track.className = 'meter-track';
      const bar = document.createElement('div');
      bar.className = 'meter-bar';
      track.appendChild(bar);
      const label = document.createElement('span');
      label.className = 'meter-db';
      label.textContent = '-inf';
      row.append(tag, track, label);
      this.el.appendChild(row);
      this.bars.push(bar);
      this.labels.push(label);
    }
  }

  update(event: MeterEvent): void {
    for (let ch = 0; ch < 2; ch++) {
      const rms = event.rms[ch];
      const frac = Math.min(Math.max((rms - FLOOR_DB) / -FLOOR_DB, 0), 1);
      this.bars[ch].style.width = `${(frac * 100).toFixed(1)}%`;
      this.bars[ch].classList.toggle('hot', event.peak[ch] > -3);
      this.labels[ch].textContent = rms <= FLOOR_DB ? '-inf' : `${rms.toFixed(1)} dB`;
    }
  }
}
