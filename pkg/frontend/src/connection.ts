// WebSocket session: handshake, dispatch, auto-reconnect. Controls stay
// disabled unless the state is 'ready'; a protocol mismatch downgrades the
// session to read-only display.

import { PROTOCOL_VERSION } from './protocol.js';
import type { ClientMessage, ServerEvent, StateEvent } from './protocol.js';

export type ConnectionState = 'disconnected' | 'connecting' | 'ready' | 'readonly';

export interface ConnectionHandlers {
  onStateChange?: (state: ConnectionState) => void;
  onServerState?: (state: StateEvent) => void;
  onEvent?: (event: ServerEvent) => void;
}

const RECONNECT_DELAY_MS = 1000;

export class Connection {
  state: ConnectionState = 'disconnected';
  serverProtocol: number | null = null;
  private socket: WebSocket | null = null;
  private closed = false;
  private sawHello = false;
  private reconnectTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    readonly url: string,
    private readonly handlers: ConnectionHandlers = {},
  ) {}

  connect(): void {
    this.closed = false;
    this.open();
  }

  private open(): void {
    this.setState('connecting');
    this.sawHello = false;
    const ws = new WebSocket(this.url);
    this.socket = ws;
    ws.onmessage = (ev: MessageEvent) => this.onMessage(String(ev.data));
    ws.onclose = () => this.onDrop();
    ws.onerror = () => {
      /* close follows */
    };
  }

  private onMessage(text: string): void {
    let event: ServerEvent;
    try {
      event = JSON.parse(text) as ServerEvent;
    } catch {
      return;
    }
    if (event.type === 'hello') {
      this.sawHello = true;
      this.serverProtocol = event.protocol;
      return;
    }
    if (event.type === 'state' && this.state === 'connecting' && this.sawHello) {
      this.setState(this.serverProtocol === PROTOCOL_VERSION ? 'ready' : 'readonly');
      this.handlers.onServerState?.(event);
      return;
    }
    if (event.type === 'state') {
      this.handlers.onServerState?.(event);
      return;
    }
    this.handlers.onEvent?.(event);
  }

  private onDrop(): void {
    this.socket = null;
    if (this.closed) {
      this.setState('disconnected');
      return;
    }
    this.setState('disconnected');
    this.reconnectTimer = setTimeout(() => this.open(), RECONNECT_DELAY_MS);
  }

  send(msg: ClientMessage): boolean {
    if (this.state !== 'ready' || !this.socket) return false;
    this.socket.send(JSON.stringify(msg));
    return true;
  }

  close(): void {
    this.closed = true;
    if (this.reconnectTimer !== null) clearTimeout(this.reconnectTimer);
    this.socket?.close();
    this.setState('disconnected');
  }

  private setState(next: ConnectionState): void {
    if (this.state === next) return;
    this.state = next;
    this.handlers.onStateChange?.(next);
  }
}
