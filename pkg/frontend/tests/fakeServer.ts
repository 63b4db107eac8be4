// In-process stand-in for the live server: implements just enough of the
// WebSocket surface for the client, answers the handshake with real state
// snapshots captured from the server, and echoes the protocol's acks.

import shadowsState from './fixtures/state_shadows.json';
import wintermuteState from './fixtures/state_wintermute.json';

type Json = Record<string, unknown>;

export class FakeSocket {
  onmessage: ((ev: { data: string }) => void) | null = null;
  onclose: (() => void) | null = null;
  onerror: (() => void) | null = null;
  readyState = 0;

  constructor(
    readonly url: string,
    private readonly server: FakeServer,
  ) {
    queueMicrotask(() => this.server.accept(this));
  }

  send(text: string): void {
    this.server.receive(this, JSON.parse(text));
  }

  close(): void {
    this.readyState = 3;
    this.server.drop(this);
    this.onclose?.();
  }

  deliver(event: Json): void {
    this.onmessage?.({ data: JSON.stringify(event) });
  }
}

export class FakeServer {
  received: Json[] = [];
  clients: FakeSocket[] = [];
  helloProtocol = 1;
  engine = 'shadows';
  noteOns: Json[] = [];
  noteOffs: Json[] = [];

  stateFor(engine: string): Json {
    const fixture = engine === 'shadows' ? shadowsState : wintermuteState;
    return JSON.parse(JSON.stringify(fixture)) as Json;
  }

  accept(socket: FakeSocket): void {
    socket.readyState = 1;
    this.clients.push(socket);
    socket.deliver({ type: 'hello', protocol: this.helloProtocol });
    socket.deliver(this.stateFor(this.engine));
  }

  drop(socket: FakeSocket): void {
    this.clients = this.clients.filter((c) => c !== socket);
  }

  broadcast(event: Json): void {
    for (const client of this.clients) client.deliver(event);
  }

  receive(socket: FakeSocket, msg: Json): void {
    this.received.push(msg);
    switch (msg.type) {
      case 'set_param': {
        const value = Math.min(Math.max(msg.value as number, 0), 1);
        socket.deliver({ type: 'ok' });
        this.broadcast({ type: 'param_changed', id: msg.id, value, natural: value });
        break;
      }
      case 'note_on':
        this.noteOns.push(msg);
        socket.deliver({ type: 'ok' });
        break;
      case 'note_off':
        this.noteOffs.push(msg);
        socket.deliver({ type: 'ok' });
        break;
      case 'select_engine':
        this.engine = msg.engine as string;
        socket.deliver({ type: 'ok' });
        this.broadcast(this.stateFor(this.engine));
        break;
      case 'load_preset':
        socket.deliver({ type: 'ok' });
        this.broadcast(this.stateFor(this.engine));
        break;
      default:
        socket.deliver({ type: 'ok' });
    }
  }

  /** WebSocket constructor to stub into the page global. */
  socketClass(): typeof WebSocket {
    const server = this;
    return class {
      constructor(url: string) {
        return new FakeSocket(url, server) as unknown as WebSocket;
      }
    } as unknown as typeof WebSocket;
  }
}

export function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}
