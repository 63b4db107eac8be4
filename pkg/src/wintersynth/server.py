"""Headless live mode: a render loop fed by a wait-free mailbox, and a
WebSocket control protocol (JSON text frames) for parameters, notes,
presets and metering. See docs/protocol.md for the message catalog."""

from __future__ import annotations

import collections
import json
import math
import threading
import time

import numpy as np

from .blocks import CONTROL_BLOCK
from .presets import (
    Preset,
    PresetError,
    apply_preset,
    factory_presets,
    load_preset,
    save_preset,
)
from .shadows import ShadowsEngine
from .wintermute import WintermuteEngine
from . import registry

PROTOCOL_VERSION = 1
METER_INTERVAL = 1.0 / 30.0
METER_FLOOR_DB = -120.0


class ProtocolError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


def _make_engine(name: str, sample_rate: int, seed: int):
    if name == "wintermute":
        return WintermuteEngine(sample_rate=sample_rate, seed=seed)
    if name == "shadows":
        return ShadowsEngine(sample_rate=sample_rate, seed=seed)
    raise ProtocolError("unknown_engine", f"unknown engine {name!r}")


def _dbfs(x: float) -> float:
    if x <= 0.0:
        return METER_FLOOR_DB
    return max(20.0 * math.log10(x), METER_FLOOR_DB)


class EngineHost:
    """Owns the engine and the render path.

    Network threads call handle()/handle_text(); all engine mutation is
    queued as plain tuples in a deque and applied by the render side at
    the start of render_once(), i.e. at a control-block boundary. The
    render path allocates nothing once warmed: buffers are preallocated
    and meters are written into fixed arrays.
    """

    def __init__(
        self,
        engine: str = "wintermute",
        preset: Preset | None = None,
        seed: int = 0,
        sample_rate: int = 48000,
        buffer_frames: int = 256,
    ):
        if buffer_frames % CONTROL_BLOCK:
            raise ValueError("buffer_frames must be a multiple of the control block")
        self.sample_rate = sample_rate
        self.buffer_frames = buffer_frames
        self.seed = seed
        if preset is not None:
            engine = preset.engine
        self.engine = _make_engine(engine, sample_rate, seed)
        if preset is not None:
            apply_preset(self.engine, preset)
        self.engine.prepare(buffer_frames)
        self._naturals = {pid: self.engine.get_param(pid) for pid in self.engine.param_ids()}
        self._mailbox = collections.deque()
        self._outl = np.zeros(buffer_frames)
        self._outr = np.zeros(buffer_frames)
        self._sq = np.zeros(buffer_frames)
        self.meter = np.zeros(4)  # rms L/R, peak L/R (linear)
        self.voice_count = 0
        self.saved_presets: dict[str, Preset] = {}
        self._store_lock = threading.Lock()

    # -- network side --------------------------------------------------------

    def handle_text(self, text: str):
        try:
            msg = json.loads(text)
        except json.JSONDecodeError as e:
            return {"type": "error", "code": "bad_json", "message": str(e)}, []
        if not isinstance(msg, dict):
            return {"type": "error", "code": "bad_message", "message": "expected an object"}, []
        return self.handle(msg)

    def handle(self, msg: dict):
        """Returns (ack, broadcasts). The ack echoes any client seq."""
        seq = msg.get("seq")
        try:
            ack, broadcasts = self._dispatch(msg)
        except ProtocolError as e:
            ack, broadcasts = {"type": "error", "code": e.code, "message": str(e)}, []
        if seq is not None:
            ack["seq"] = seq
        return ack, broadcasts

    def _dispatch(self, msg: dict):
        mtype = msg.get("type")
        if mtype == "set_param":
            return self._on_set_param(msg)
        if mtype == "note_on":
            return self._on_note(msg, on=True)
        if mtype == "note_off":
            return self._on_note(msg, on=False)
        if mtype == "load_preset":
            return self._on_load_preset(msg)
        if mtype == "save_preset":
            return self._on_save_preset(msg)
        if mtype == "get_state":
            return {"type": "ok"}, [self.state_event()]
        if mtype == "select_engine":
            return self._on_select_engine(msg)
        raise ProtocolError("bad_type", f"unknown message type {mtype!r}")

    def _on_set_param(self, msg):
        pid = msg.get("id")
        try:
            d = registry.descriptor(pid)
        except KeyError:
            raise ProtocolError("unknown_param", f"unknown parameter id {pid!r}") from None
        if not pid.startswith(self.engine.name + "."):
            raise ProtocolError(
                "wrong_engine", f"{pid} does not belong to engine {self.engine.name!r}"
            )
        value = msg.get("value")
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ProtocolError("bad_value", f"value for {pid} must be a number")
        norm = min(max(float(value), 0.0), 1.0)
        natural = d.to_natural(norm)
        with self._store_lock:
            self._naturals[pid] = natural
        self._mailbox.append(("param", pid, natural))
        event = {"type": "param_changed", "id": pid, "value": norm, "natural": natural}
        return {"type": "ok"}, [event]

    def _on_note(self, msg, on: bool):
        note = msg.get("note")
        if not isinstance(note, int) or not 0 <= note <= 127:
            raise ProtocolError("bad_note", f"note must be an integer 0..127, got {note!r}")
        if self.engine.name != "shadows":
            return {
                "type": "ok",
                "warning": "the drone engine ignores note events",
            }, []
        if on:
            velocity = msg.get("velocity", 1.0)
            if not isinstance(velocity, (int, float)) or not 0.0 < velocity <= 1.0:
                raise ProtocolError("bad_velocity", "velocity must be in (0, 1]")
            self._mailbox.append(("note_on", note, float(velocity)))
        else:
            self._mailbox.append(("note_off", note))
        return {"type": "ok"}, []

    def _resolve_preset(self, msg) -> Preset:
        if "document" in msg:
            try:
                return load_preset(msg["document"])
            except PresetError as e:
                raise ProtocolError("bad_preset", str(e)) from None
        name = msg.get("name")
        presets = {**factory_presets(), **self.saved_presets}
        if name not in presets:
            raise ProtocolError("unknown_preset", f"unknown preset {name!r}")
        return presets[name]

    def _on_load_preset(self, msg):
        preset = self._resolve_preset(msg)
        if preset.engine != self.engine.name:
            return self._swap_engine(preset.engine, preset)
        updates = [(pid, value) for pid, value in preset.params.items()]
        with self._store_lock:
            self._naturals.update(preset.params)
        self._mailbox.append(("preset", updates))  # applied in one drain step
        return {"type": "ok", "preset": preset.name}, [self.state_event()]

    def _on_save_preset(self, msg):
        name = msg.get("name")
        if not isinstance(name, str) or not name:
            raise ProtocolError("bad_name", "save_preset needs a non-empty name")
        with self._store_lock:
            params = dict(self._naturals)
        preset = Preset(engine=self.engine.name, name=name, params=params, seed=self.seed)
        self.saved_presets[name] = preset
        return {"type": "ok", "document": save_preset(preset)}, [self.state_event()]

    def _on_select_engine(self, msg):
        name = msg.get("engine")
        if name not in registry.ENGINES:
            raise ProtocolError("unknown_engine", f"unknown engine {name!r}")
        if name == self.engine.name:
            return {"type": "ok"}, []
        return self._swap_engine(name, None)

    def _swap_engine(self, name: str, preset: Preset | None):
        engine = _make_engine(name, self.sample_rate, self.seed)
        if preset is not None:
            apply_preset(engine, preset)
        engine.prepare(self.buffer_frames)
        with self._store_lock:
            self._naturals = {pid: engine.get_param(pid) for pid in engine.param_ids()}
        self._mailbox.append(("swap", engine))
        self.engine = engine  # network-side view; render swaps at the boundary
        return {"type": "ok", "engine": name}, [self.state_event()]

    def state_event(self) -> dict:
        with self._store_lock:
            naturals = dict(self._naturals)
        params = []
        for d in registry.descriptors(self.engine.name):
            natural = naturals[d.id]
            entry = d.as_dict()
            entry["natural"] = natural
            entry["value"] = d.to_normalized(natural)
            params.append(entry)
        return {
            "type": "state",
            "protocol": PROTOCOL_VERSION,
            "engine": self.engine.name,
            "seed": self.seed,
            "presets": sorted({**factory_presets(), **self.saved_presets}),
            "params": params,
        }

    def hello_event(self) -> dict:
        return {"type": "hello", "protocol": PROTOCOL_VERSION}

    def meter_event(self) -> dict:
        return {
            "type": "meter",
            "rms": [_dbfs(self.meter[0]), _dbfs(self.meter[1])],
            "peak": [_dbfs(self.meter[2]), _dbfs(self.meter[3])],
        }

    def voice_count_event(self) -> dict:
        return {"type": "voice_count", "count": self.voice_count}

    @property
    def pending_messages(self) -> int:
        return len(self._mailbox)

    # -- render side -----------------------------------------------------------

    def drain_mailbox(self) -> None:
        mailbox = self._mailbox
        engine = self.engine
        while mailbox:
            op = mailbox.popleft()
            kind = op[0]
            if kind == "param":
                engine.set_param(op[1], op[2])
            elif kind == "note_on":
                engine.note_on(op[1], op[2])
            elif kind == "note_off":
                engine.note_off(op[1])
            elif kind == "preset":
                for pid, value in op[1]:
                    engine.set_param(pid, value)
            elif kind == "swap":
                engine = op[1]
        self.engine = engine

    def render_once(self, outl=None, outr=None) -> None:
        """One audio buffer: drain control updates, render, update meters."""
        if outl is None:
            outl, outr = self._outl, self._outr
        self.drain_mailbox()
        self.engine.render_into(outl, outr)
        np.multiply(outl, outl, out=self._sq)
        self.meter[0] = math.sqrt(self._sq.mean())
        self.meter[2] = math.sqrt(self._sq.max())
        np.multiply(outr, outr, out=self._sq)
        self.meter[1] = math.sqrt(self._sq.mean())
        self.meter[3] = math.sqrt(self._sq.max())
        self.voice_count = self.engine.active_voice_count


class NullAudioDriver:
    """Paces render_once() from a timer; stands in for a device in CI."""

    def __init__(self, host: EngineHost):
        self.host = host
        self._stop = threading.Event()
        self._thread = None

    def start(self):
        self._thread = threading.Thread(target=self._run, name="null-audio", daemon=True)
        self._thread.start()

    def _run(self):
        period = self.host.buffer_frames / self.host.sample_rate
        deadline = time.monotonic()
        while not self._stop.is_set():
            self.host.render_once()
            deadline += period
            delay = deadline - time.monotonic()
            if delay > 0:
                time.sleep(delay)
            else:
                deadline = time.monotonic()  # fell behind; don't spiral

    def stop(self):
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=2.0)


class SoundDeviceDriver:
    """Real audio output through sounddevice, when it is installed."""

    def __init__(self, host: EngineHost):
        try:
            import sounddevice
        except ImportError as e:
            raise RuntimeError(
                "audio device output needs the 'sounddevice' package; "
                "use --null-audio otherwise"
            ) from e
        self._sd = sounddevice
        self.host = host
        self._stream = None

    def start(self):
        host = self.host

        def callback(outdata, frames, time_info, status):
            host.render_once()
            outdata[:, 0] = host._outl
            outdata[:, 1] = host._outr

        self._stream = self._sd.OutputStream(
            samplerate=host.sample_rate,
            blocksize=host.buffer_frames,
            channels=2,
            dtype="float32",
            callback=callback,
        )
        self._stream.start()

    def stop(self):
        if self._stream is not None:
            self._stream.stop()
            self._stream.close()


class SynthServer:
    """WebSocket front door plus the audio driver."""

    def __init__(
        self,
        host: EngineHost,
        port: int = 8765,
        bind: str = "127.0.0.1",
        null_audio: bool = True,
    ):
        self.host = host
        self.port = port
        self.bind = bind
        self.driver = NullAudioDriver(host) if null_audio else SoundDeviceDriver(host)
        self._clients = set()
        self._clients_lock = threading.Lock()
        self._ws_server = None
        self._meter_thread = None
        self._stop = threading.Event()

    # one lock per connection: websockets sync connections are not
    # thread-safe for concurrent send()
    def _register(self, conn):
        pair = (conn, threading.Lock())
        with self._clients_lock:
            self._clients.add(pair)
        return pair

    def _unregister(self, pair):
        with self._clients_lock:
            self._clients.discard(pair)

    def _send(self, pair, payload: str):
        conn, lock = pair
        try:
            with lock:
                conn.send(payload)
        except Exception:
            self._unregister(pair)

    def broadcast(self, event: dict):
        payload = json.dumps(event)
        with self._clients_lock:
            clients = list(self._clients)
        for pair in clients:
            self._send(pair, payload)

    def _client_handler(self, conn):
        pair = self._register(conn)
        try:
            self._send(pair, json.dumps(self.host.hello_event()))
            self._send(pair, json.dumps(self.host.state_event()))
            for text in conn:
                ack, broadcasts = self.host.handle_text(text)
                self._send(pair, json.dumps(ack))
                for event in broadcasts:
                    self.broadcast(event)
        finally:
            self._unregister(pair)

    def _meter_loop(self):
        while not self._stop.wait(METER_INTERVAL):
            with self._clients_lock:
                any_clients = bool(self._clients)
            if any_clients:
                self.broadcast(self.host.meter_event())
                self.broadcast(self.host.voice_count_event())

    def start(self):
        from websockets.sync.server import serve

        self._ws_server = serve(self._client_handler, self.bind, self.port)
        self.port = self._ws_server.socket.getsockname()[1]
        self.driver.start()
        self._meter_thread = threading.Thread(target=self._meter_loop, daemon=True)
        self._meter_thread.start()
        self._serve_thread = threading.Thread(
            target=self._ws_server.serve_forever, daemon=True
        )
        self._serve_thread.start()

    def stop(self):
        self._stop.set()
        self.driver.stop()
        if self._ws_server is not None:
            self._ws_server.shutdown()
        if self._meter_thread is not None:
            self._meter_thread.join(timeout=2.0)

    def run_forever(self):
        try:
            while True:
                time.sleep(0.5)
        except KeyboardInterrupt:
            pass
        finally:
            self.stop()


def serve_static(directory: str, port: int, bind: str = "127.0.0.1"):
    """Serve the control-surface files over plain HTTP in a thread."""
    import functools
    from http.server import SimpleHTTPRequestHandler, ThreadingHTTPServer

    handler = functools.partial(SimpleHTTPRequestHandler, directory=directory)
    httpd = ThreadingHTTPServer((bind, port), handler)
    thread = threading.Thread(target=httpd.serve_forever, daemon=True)
    thread.start()
    return httpd
