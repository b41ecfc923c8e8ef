"""Operator command line: live, replay, merge-bvh, score, inspect.

Exit codes are stable: 0 success, 2 usage/configuration, 3 data integrity,
4 protocol/runtime. The world/scenario config file is given with --config
or the PEDILOOP_CONFIG environment variable.
"""
from __future__ import annotations

import argparse
import asyncio
import json
import os
import sys
from pathlib import Path

from . import presence
from .bvh import parse_bvh
from .driver import ScriptedPedestrian
from .errors import (
    ConfigError,
    CorruptionError,
    DegenerateDataError,
    MergeError,
    PediloopError,
    RecordingFormatError,
    ResponseValidationError,
    SequenceError,
)
from .opendrive import parse_opendrive
from .recording import (
    Recording,
    TimingStats,
    export_snapshots_text,
    load_recording,
    merge_bvh_into_recording,
    save_recording,
)
from .retarget import AxisMap, RetargetConfig, retarget_to_avatar
from .runtime import run_live, serve_live
from .sensors import (
    DepthCameraConfig,
    LidarConfig,
    SensorSuite,
    depth_to_pgm,
    pedestrian_visibility,
    scan_to_bytes,
    scan_to_text,
)
from .worldsim import load_world_config
from .worldsim.world import WALKER_ID

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_RUNTIME = 4

_CONFIG_ENV = "PEDILOOP_CONFIG"


def _timing_report(t: TimingStats) -> str:
    return (
        f"mode={t.mode.value} ticks={len(t.tick_durations)} "
        f"achieved_fps={t.achieved_fps:.2f} dt={t.dt * 1000:.0f}ms "
        f"budget_violations={t.budget_violations} sensor_ops={t.sensor_ops}"
    )


def _load_world(config_path: str | None):
    path = config_path or os.environ.get(_CONFIG_ENV)
    if not path:
        raise ConfigError(f"no config file given (use --config or {_CONFIG_ENV})")
    config = load_world_config(path)
    if not config.map_path.is_file():
        raise ConfigError(f"map file not found: {config.map_path}")
    map_model = parse_opendrive(config.map_path.read_text(encoding="utf-8"))
    return config, map_model


def cmd_live(args: argparse.Namespace) -> int:
    config, map_model = _load_world(args.config)
    driver = ScriptedPedestrian(map_model) if args.driver == "auto" else None

    if args.serve:
        result = asyncio.run(
            serve_live(
                config,
                map_model,
                host=args.host,
                tcp_port=args.tcp_port,
                http_port=args.http_port,
                static_dir=Path(args.static).resolve() if args.static else None,
                driver=driver,
                realtime=not args.fast,
                autostart=driver is not None or args.autostart,
                max_ticks=args.max_ticks,
            )
        )
    else:
        result = run_live(
            config,
            map_model,
            driver=driver,
            realtime=not args.fast,
            max_ticks=args.max_ticks,
        )

    save_recording(result.recording, args.out)
    print(f"recorded {len(result.recording)} ticks -> {args.out}")
    print(_timing_report(result.timing))
    print("live target is 18.18 FPS (55 ms ticks); achieved rate is hardware-dependent")
    return EXIT_OK


def cmd_replay(args: argparse.Namespace) -> int:
    rec = load_recording(args.recording, verify=True)
    print(f"hash verification passed ({len(rec)} snapshots)")

    lidars = []
    cameras = []
    vehicle_ids = sorted({v.id for s in rec.snapshots for v in s.vehicles})
    mount_vehicle = vehicle_ids[0] if vehicle_ids else None
    if args.lidar and mount_vehicle is not None:
        lidars.append(
            LidarConfig(
                vehicle_id=mount_vehicle,
                channels=args.lidar_channels,
                points_per_channel=args.lidar_points,
            )
        )
    if args.depth and mount_vehicle is not None:
        cameras.append(DepthCameraConfig(vehicle_id=mount_vehicle))
    suite = SensorSuite(tuple(lidars), tuple(cameras)) if (lidars or cameras) else None

    out_dir = Path(args.out_dir) if args.out_dir else None
    if suite is not None and out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)

    for snap in rec.snapshots:
        frames = suite.capture(snap) if suite is not None else None
        if frames is None:
            continue
        for _, scan in frames.scans:
            vis = pedestrian_visibility(scan, WALKER_ID)
            print(f"tick {snap.tick}: walker points={vis.point_count}")
            if out_dir is not None:
                (out_dir / f"lidar_{snap.tick:06d}.txt").write_text(scan_to_text(scan))
                (out_dir / f"lidar_{snap.tick:06d}.bin").write_bytes(scan_to_bytes(scan))
        for cfg, img in frames.depths:
            if out_dir is not None:
                (out_dir / f"depth_{snap.tick:06d}.pgm").write_text(depth_to_pgm(img))

    if args.print_snapshots:
        for line in export_snapshots_text(rec, limit=args.print_snapshots):
            print(line)
    return EXIT_OK


def cmd_merge_bvh(args: argparse.Namespace) -> int:
    if Path(args.out).resolve() == Path(args.recording).resolve():
        raise ConfigError("merge output must not overwrite the input recording")
    rec = load_recording(args.recording, verify=True)
    clip = parse_bvh(Path(args.clip).read_text(encoding="utf-8"))

    name_map = {}
    if args.name_map:
        name_map = json.loads(Path(args.name_map).read_text(encoding="utf-8"))
    axis_tokens = tuple(t.strip() for t in args.axis_map.split(","))
    if len(axis_tokens) != 3:
        raise ConfigError(f"--axis-map needs three comma-separated tokens, got {args.axis_map!r}")
    config = RetargetConfig(
        unit_scale=args.unit_scale,
        axis_map=AxisMap(tokens=axis_tokens, mirror=args.mirror),
        joint_name_map=name_map,
    )
    track = retarget_to_avatar(clip, config, rec.dt_ms)
    merged = merge_bvh_into_recording(rec, track)
    save_recording(merged, args.out)
    print(f"merged {len(track)} tick poses into {len(merged)} snapshots -> {args.out}")
    return EXIT_OK


def cmd_score(args: argparse.Namespace) -> int:
    responses = presence.load_responses(args.responses)
    stats = presence.score_subscales(responses)
    alpha = presence.alpha_for_responses(responses)
    print(presence.format_report(stats, alpha))
    if args.per_subscale_alpha:
        for name, items in presence.SUBSCALES:
            sub_alpha = presence.alpha_for_responses(responses, [i + 1 for i in items])
            print(f"{name} alpha={sub_alpha:.3f}")
    if args.json:
        Path(args.json).write_text(
            json.dumps(presence.report_jsonable(stats, alpha), indent=2) + "\n"
        )
    return EXIT_OK


def cmd_inspect(args: argparse.Namespace) -> int:
    rec = load_recording(args.recording, verify=not args.no_verify)
    print(f"dt_ms={rec.dt_ms} snapshots={len(rec)} map_digest={rec.map_digest[:16]}...")
    print(f"scenario={rec.scenario}")
    print(f"motion_track={'yes (%d poses)' % len(rec.motion_track) if rec.motion_track else 'no'}")
    if args.snapshots:
        for line in export_snapshots_text(rec, limit=args.limit):
            print(line)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pediloop",
        description="Pedestrian-in-the-loop traffic simulation harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    live = sub.add_parser("live", help="run a live session and record it (sensor-free)")
    live.add_argument("--config", help=f"world/scenario config (or ${_CONFIG_ENV})")
    live.add_argument("--out", required=True, help="recording output path (.plrec)")
    live.add_argument("--serve", action="store_true", help="host TCP/WebSocket endpoints")
    live.add_argument("--host", default="127.0.0.1")
    live.add_argument("--tcp-port", type=int, default=7077)
    live.add_argument("--http-port", type=int, default=7078)
    live.add_argument("--static", help="directory of UI assets to serve over HTTP")
    live.add_argument("--driver", choices=["auto", "none"], default="auto",
                      help="auto: built-in scripted pedestrian; none: wait for a network pedestrian")
    live.add_argument("--fast", action="store_true", help="run unpaced instead of 55 ms wall ticks")
    live.add_argument("--autostart", action="store_true",
                      help="start the scenario immediately instead of waiting for a start command")
    live.add_argument("--max-ticks", type=int, default=4000)
    live.set_defaults(func=cmd_live)

    replay = sub.add_parser("replay", help="verify and replay a recording with sensors")
    replay.add_argument("--recording", required=True)
    replay.add_argument("--out-dir", help="directory for sensor exports")
    replay.add_argument("--lidar", action="store_true", help="attach the ray-cast lidar")
    replay.add_argument("--lidar-channels", type=int, default=32)
    replay.add_argument("--lidar-points", type=int, default=1024)
    replay.add_argument("--depth", action="store_true", help="attach the depth camera")
    replay.add_argument("--print-snapshots", type=int, metavar="N",
                        help="print the first N snapshots as JSON lines")
    replay.set_defaults(func=cmd_replay)

    merge = sub.add_parser("merge-bvh", help="merge a mocap clip into a recording")
    merge.add_argument("--recording", required=True)
    merge.add_argument("--clip", required=True, help=".bvh motion clip")
    merge.add_argument("--out", required=True, help="merged recording output path")
    merge.add_argument("--unit-scale", type=float, default=0.01, help="meters per clip unit")
    merge.add_argument("--axis-map", default="x,-z,y",
                       help="world axes as signed clip axes, e.g. 'x,-z,y'")
    merge.add_argument("--mirror", action="store_true", help="declare a handedness flip")
    merge.add_argument("--name-map", help="JSON file mapping clip joints to avatar joints")
    merge.set_defaults(func=cmd_merge_bvh)

    score = sub.add_parser("score", help="score a presence questionnaire response file")
    score.add_argument("--responses", required=True, help="CSV: participant + 15 item columns")
    score.add_argument("--json", help="also write a machine-readable summary")
    score.add_argument("--per-subscale-alpha", action="store_true")
    score.set_defaults(func=cmd_score)

    inspect = sub.add_parser("inspect", help="print recording header and snapshots")
    inspect.add_argument("--recording", required=True)
    inspect.add_argument("--snapshots", action="store_true", help="print snapshot JSON lines")
    inspect.add_argument("--limit", type=int, default=None)
    inspect.add_argument("--no-verify", action="store_true")
    inspect.set_defaults(func=cmd_inspect)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (
        CorruptionError,
        RecordingFormatError,
        SequenceError,
        MergeError,
        ResponseValidationError,
        DegenerateDataError,
    ) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as e:
        print(f"error: file not found: {e.filename or e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    except PediloopError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
