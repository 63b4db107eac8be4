// Control surface: header (connection, engine, presets), knob panel built
// from the server's registry snapshot, virtual keyboard for the polysynth,
// meters. Nothing about parameters is hard-coded client-side.

import { Connection } from './connection.js';
import type { ConnectionState } from './connection.js';
import { Keyboard } from './keyboard.js';
import { Knob } from './knob.js';
import { Meters } from './meters.js';
import { ParamStore } from './params.js';
import type { ServerEvent, StateEvent } from './protocol.js';

export class App {
  readonly store = new ParamStore();
  readonly connection: Connection;
  readonly keyboard: Keyboard;
  readonly meters = new Meters();
  private knobs = new Map<string, Knob>();
  private panel: HTMLElement;
  private status: HTMLElement;
  private voiceLabel: HTMLElement;
  private engineSelect: HTMLSelectElement;
  private presetSelect: HTMLSelectElement;
  private keyboardSlot: HTMLElement;
  private wasConnected = false;

  constructor(
    readonly root: HTMLElement,
    url: string,
    private readonly now?: () => number,
  ) {
    this.connection = new Connection(url, {
      onStateChange: (s) => this.onConnectionState(s),
      onServerState: (s) => this.onServerState(s),
      onEvent: (e) => this.onEvent(e),
    });
    this.keyboard = new Keyboard((msg) => this.connection.send(msg));

    root.innerHTML = '';
    const header = document.createElement('header');
    this.status = document.createElement('span');
    this.status.className = 'conn-status';
    this.engineSelect = document.createElement('select');
    this.engineSelect.className = 'engine-select';
    for (const engine of ['wintermute', 'shadows']) {
      const opt = document.createElement('option');
      opt.value = engine;
      opt.textContent = engine;
      this.engineSelect.appendChild(opt);
    }
    this.engineSelect.addEventListener('change', () => {
      this.connection.send({ type: 'select_engine', engine: this.engineSelect.value });
    });
    this.presetSelect = document.createElement('select');
    this.presetSelect.className = 'preset-select';
    const loadBtn = document.createElement('button');
    loadBtn.textContent = 'load';
    loadBtn.className = 'preset-load';
    loadBtn.addEventListener('click', () => {
      if (this.presetSelect.value) {
        this.connection.send({ type: 'load_preset', name: this.presetSelect.value });
      }
    });
    const saveBtn = document.createElement('button');
    saveBtn.textContent = 'save';
    saveBtn.className = 'preset-save';
    saveBtn.addEventListener('click', () => {
      const name = window.prompt?.('preset name');
      if (name) this.connection.send({ type: 'save_preset', name });
    });
    this.voiceLabel = document.createElement('span');
    this.voiceLabel.className = 'voice-count';
    header.append(
      this.status,
      this.engineSelect,
      this.presetSelect,
      loadBtn,
      saveBtn,
      this.meters.el,
      this.voiceLabel,
    );

    this.panel = document.createElement('main');
    this.panel.className = 'panel';
    this.keyboardSlot = document.createElement('footer');
    this.keyboardSlot.appendChild(this.keyboard.el);
    root.append(header, this.panel, this.keyboardSlot);

    this.keyboard.attachComputerKeys(window);
    window.addEventListener('pagehide', () => this.keyboard.flushAll());
    this.onConnectionState('disconnected');
  }

  start(): void {
    this.connection.connect();
  }

  private onConnectionState(state: ConnectionState): void {
    this.status.textContent = state;
    this.status.dataset.state = state;
    const live = state === 'ready';
    this.root.classList.toggle('offline', !live);
    for (const knob of this.knobs.values()) knob.setEnabled(live);
    this.keyboard.setEnabled(live);
    this.engineSelect.disabled = !live;
    this.presetSelect.disabled = !live;
    if (live) {
      if (this.wasConnected) this.keyboard.releaseStaleAfterReconnect();
      this.wasConnected = true;
    }
  }

  private onServerState(state: StateEvent): void {
    this.store.rebuild(state);
    this.engineSelect.value = state.engine;
    this.presetSelect.innerHTML = '';
    for (const name of state.presets) {
      const opt = document.createElement('option');
      opt.value = name;
      opt.textContent = name;
      this.presetSelect.appendChild(opt);
    }
    this.knobs.clear();
    this.panel.innerHTML = '';
    for (const param of this.store.params.values()) {
      const knob = new Knob(
        param,
        (id, value) => {
          this.store.localEdit(id, value);
          this.connection.send({ type: 'set_param', id, value });
        },
        this.now,
      );
      knob.setEnabled(this.connection.state === 'ready');
      this.knobs.set(param.snapshot.id, knob);
      this.panel.appendChild(knob.el);
    }
    this.keyboardSlot.style.display = state.engine === 'shadows' ? '' : 'none';
  }

  private onEvent(event: ServerEvent): void {
    if (event.type === 'param_changed') {
      if (this.store.confirm(event.id, event.value)) {
        this.knobs.get(event.id)?.refresh();
      }
    } else if (event.type === 'meter') {
      this.meters.update(event);
    } else if (event.type === 'voice_count') {
      this.voiceLabel.textContent = `${event.count} voices`;
    }
  }
}
