// Wire types for the live-server protocol (JSON over WebSocket, v1).

export const PROTOCOL_VERSION = 1;

export interface ParamDescriptor {
  id: string;
  name: string;
  unit: string;
  lo: number;
  hi: number;
  curve: 'linear' | 'exponential';
  default: number;
  integer: boolean;
}

export interface ParamSnapshot extends ParamDescriptor {
  value: number; // normalized 0..1
  natural: number; // in descriptor units
}

export interface StateEvent {
  type: 'state';
  protocol: number;
  engine: string;
  seed: number;
  presets: string[];
  params: ParamSnapshot[];
}

export interface HelloEvent {
  type: 'hello';
  protocol: number;
}

export interface ParamChangedEvent {
  type: 'param_changed';
  id: string;
  value: number;
  natural: number;
}

export interface MeterEvent {
  type: 'meter';
  rms: [number, number];
  peak: [number, number];
}

export interface VoiceCountEvent {
  type: 'voice_count';
  count: number;
}

export type ServerEvent =
  | HelloEvent
  | StateEvent
  | ParamChangedEvent
  | MeterEvent
  | VoiceCountEvent
  | { type: 'ok'; [k: string]: unknown }
  | { type: 'error'; code?: string; message?: string; [k: string]: unknown };

export type ClientMessage =
  | { type: 'set_param'; id: string; value: number; seq?: number }
  | { type: 'note_on'; note: number; velocity: number }
  | { type: 'note_off'; note: number }
  | { type: 'load_preset'; name: string }
  | { type: 'save_preset'; name: string }
  | { type: 'get_state' }
  | { type: 'select_engine'; engine: string };

export function toNatural(d: ParamDescriptor, norm: number): number {
  const v = Math.min(Math.max(norm, 0), 1);
  let nat: number;
  if (d.curve === 'exponential') {
    nat = d.lo * Math.pow(d.hi / d.lo, v);
  } else {
    nat = d.lo + v * (d.hi - d.lo);
  }
  return d.integer ? Math.round(nat) : nat;
}

export function toNormalized(d: ParamDescriptor, natural: number): number {
  const v = Math.min(Math.max(natural, d.lo), d.hi);
  if (d.curve === 'exponential') {
    return Math.log(v / d.lo) / Math.log(d.hi / d.lo);
  }
  return (v - d.lo) / (d.hi - d.lo);
}

export function formatNatural(d: ParamDescriptor, natural: number): string {
  const text = d.integer
    ? String(Math.round(natural))
    : Math.abs(natural) >= 100
      ? natural.toFixed(0)
      : natural.toFixed(Math.abs(natural) >= 1 ? 2 : 3);
  return d.unit ? `${text} ${d.unit}` : text;
}
