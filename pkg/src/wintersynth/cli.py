"""Command line: offline rendering, preset inspection, the live server."""

from __future__ import annotations

import argparse
import os
import sys

from .midifile import parse_midi
from .presets import factory_presets, load_preset, preset_to_json
from .render import SUPPORTED_RATES, render_offline


def _resolve_preset(ref: str):
    presets = factory_presets()
    if ref in presets:
        return presets[ref]
    if os.path.exists(ref):
        with open(ref, "r", encoding="utf-8") as f:
            return load_preset(f.read())
    raise FileNotFoundError(
        f"no preset file {ref!r} and no factory preset of that name "
        f"(available: {', '.join(presets)})"
    )


def _cmd_render(args) -> int:
    preset = _resolve_preset(args.preset)
    events = None
    if args.midi:
        with open(args.midi, "rb") as f:
            events, _ = parse_midi(f.read())
    wav = render_offline(
        preset,
        events=events,
        duration=args.duration,
        seed=args.seed,
        sample_rate=args.sr,
    )
    with open(args.out, "wb") as f:
        f.write(wav)
    return 0


def _cmd_presets(args) -> int:
    presets = factory_presets()
    if args.action == "list":
        for name, preset in presets.items():
            print(f"{name}\t[{preset.engine}]")
        return 0
    if args.name not in presets:
        raise KeyError(f"unknown preset {args.name!r}")
    print(preset_to_json(presets[args.name]), end="")
    return 0


def _cmd_serve(args) -> int:
    from .server import EngineHost, SynthServer, serve_static

    preset = _resolve_preset(args.preset) if args.preset else None
    host = EngineHost(
        engine=args.engine,
        preset=preset,
        seed=args.seed,
        buffer_frames=args.buffer_frames,
    )
    server = SynthServer(host, port=args.port, null_audio=args.null_audio)
    server.start()
    print(f"listening on ws://127.0.0.1:{server.port}", flush=True)
    if args.static_dir:
        httpd = serve_static(args.static_dir, args.http_port)
        print(f"control surface on http://127.0.0.1:{httpd.server_address[1]}", flush=True)
    server.run_forever()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wintersynth")
    sub = parser.add_subparsers(dest="command", required=True)

    render = sub.add_parser("render", help="render a preset to a WAV file")
    render.add_argument("--preset", required=True, help="preset file or factory preset name")
    render.add_argument("--midi", help="standard MIDI file driving the shadows engine")
    render.add_argument("--duration", type=float, help="render length in seconds")
    render.add_argument("--seed", type=int, default=None, help="random seed")
    render.add_argument("--sr", type=int, default=48000, choices=SUPPORTED_RATES)
    render.add_argument("-o", "--out", required=True, help="output WAV path")
    render.set_defaults(func=_cmd_render)

    presets = sub.add_parser("presets", help="list or dump factory presets")
    presets.add_argument("action", choices=("list", "dump"))
    presets.add_argument("name", nargs="?", help="preset name (for dump)")
    presets.set_defaults(func=_cmd_presets)

    serve = sub.add_parser("serve", help="run the live server")
    serve.add_argument("--port", type=int, default=8765)
    serve.add_argument("--engine", default="wintermute", choices=("wintermute", "shadows"))
    serve.add_argument("--preset", help="preset file or factory name to start from")
    serve.add_argument("--seed", type=int, default=0)
    serve.add_argument("--null-audio", action="store_true", help="render without a device")
    serve.add_argument("--buffer-frames", type=int, default=256)
    serve.add_argument("--static-dir", help="directory with the web control surface")
    serve.add_argument("--http-port", type=int, default=8766)
    serve.set_defaults(func=_cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "presets" and args.action == "dump" and not args.name:
        parser.error("presets dump needs a preset name")
    try:
        return args.func(args)
    except Exception as e:  # every failure exits nonzero with a message
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
