"""Versioned session recordings: append during live runs, replay verbatim.

Replay returns the stored snapshots rather than re-simulating, so live/replay
equivalence holds by construction and is verified with an order-sensitive
SHA-256 over the canonical snapshot bytes.

File layout (.plrec, little-endian):

    magic   6 bytes  b"PLREC\\0"
    version u16      currently 1
    hlen    u32      header length
    header  hlen bytes of canonical JSON (sorted keys, no spaces):
            format_version, map_digest, dt_ms, scenario, created,
            snapshot_count, stream_digest, has_motion
    chunks  repeated: type u8 (1 snapshot, 2 motion track), len u32, payload

Snapshot chunk payloads are the canonical encoding from serialize.py; the
motion chunk holds the merged avatar track. stream_digest covers the
snapshot chunks only and is checked on load.
"""
from __future__ import annotations

import enum
import hashlib
import json
import struct
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable

from . import __version__
from .errors import (
    CorruptionError,
    MergeError,
    ModeViolationError,
    PediloopError,
    RecordingFormatError,
    SequenceError,
)
from .motiontrack import MotionTrack, TrackPose
from .serialize import ByteReader, ByteWriter, decode_snapshot, encode_snapshot
from .worldsim.types import Capsule, ScenarioConfig, WorldSnapshot, YieldPolicy

MAGIC = b"PLREC\x00"
FORMAT_VERSION = 1


class Mode(enum.Enum):
    LIVE = "live"
    REPLAY = "replay"


@dataclass
class Recording:
    map_digest: str
    dt_ms: int
    scenario: ScenarioConfig
    created: dict = field(default_factory=lambda: {"tool": f"pediloop {__version__}"})
    snapshots: list[WorldSnapshot] = field(default_factory=list)
    motion_track: MotionTrack | None = None

    def __len__(self) -> int:
        return len(self.snapshots)


def record_tick(rec: Recording, snapshot: WorldSnapshot) -> Recording:
    """Append one snapshot; ticks must run 0, 1, 2, ... without gaps."""
    expected = rec.snapshots[-1].tick + 1 if rec.snapshots else 0
    if snapshot.tick != expected:
        raise SequenceError(f"snapshot tick {snapshot.tick}, expected {expected}")
    want = snapshot.tick * (rec.dt_ms / 1000.0)
    if snapshot.sim_time != want:
        raise SequenceError(
            f"snapshot sim_time {snapshot.sim_time} inconsistent with dt_ms={rec.dt_ms}"
        )
    rec.snapshots.append(snapshot)
    return rec


def hash_snapshot_stream(snapshots: Iterable[WorldSnapshot]) -> str:
    """Order-sensitive SHA-256 digest over canonical snapshot bytes.

    The empty stream hashes to SHA-256 of no input:
    e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855.
    """
    h = hashlib.sha256()
    for s in snapshots:
        raw = encode_snapshot(s)
        h.update(struct.pack("<I", len(raw)))
        h.update(raw)
    return h.hexdigest()


def merge_bvh_into_recording(rec: Recording, track: MotionTrack) -> Recording:
    """Swap the walker's articulation for the mocap track, tick by tick.

    The root path stays as recorded live (the headset drove displacement;
    the capture drives body language). Returns a new Recording.
    """
    if track.dt_ms != rec.dt_ms:
        raise MergeError(f"track dt {track.dt_ms} ms does not match recording dt {rec.dt_ms} ms")
    if len(track) < len(rec.snapshots):
        raise MergeError(
            f"track has {len(track)} tick poses, recording needs {len(rec.snapshots)}"
        )

    merged: list[WorldSnapshot] = []
    for snap in rec.snapshots:
        pose = track.poses[snap.tick]
        root = snap.walker.root
        capsules = tuple(
            Capsule(root.apply(c.a), root.apply(c.b), c.radius) for c in pose.capsules
        )
        walker = replace(snap.walker, joints=pose.joints, capsules=capsules)
        merged.append(replace(snap, walker=walker))

    return Recording(
        map_digest=rec.map_digest,
        dt_ms=rec.dt_ms,
        scenario=rec.scenario,
        created=dict(rec.created),
        snapshots=merged,
        motion_track=track,
    )


def replay_step(rec: Recording, tick: int, sensor_suite=None):
    """Return the stored snapshot for a tick; optionally run sensors on it.

    Returns (snapshot, frames) where frames is None without a suite,
    otherwise whatever the suite captured against the snapshot geometry.
    """
    if not 0 <= tick < len(rec.snapshots):
        raise IndexError(f"tick {tick} outside recording of length {len(rec.snapshots)}")
    snapshot = rec.snapshots[tick]
    frames = sensor_suite.capture(snapshot) if sensor_suite is not None else None
    return snapshot, frames


def _scenario_to_json(cfg: ScenarioConfig) -> dict:
    return {
        "vehicle_spawn_s": cfg.vehicle_spawn_s,
        "target_speed": cfg.target_speed,
        "yield_policy": cfg.yield_policy.value,
        "decel": cfg.decel,
        "ehmi_enabled": cfg.ehmi_enabled,
        "stop_margin": cfg.stop_margin,
    }


def _scenario_from_json(d: dict) -> ScenarioConfig:
    return ScenarioConfig(
        vehicle_spawn_s=d["vehicle_spawn_s"],
        target_speed=d["target_speed"],
        yield_policy=YieldPolicy(d["yield_policy"]),
        decel=d["decel"],
        ehmi_enabled=d["ehmi_enabled"],
        stop_margin=d["stop_margin"],
    )


def _encode_track(track: MotionTrack) -> bytes:
    w = ByteWriter()
    w.u16(track.dt_ms)
    w.u32(len(track.poses))
    for pose in track.poses:
        w.transform(pose.root)
        w.u16(len(pose.joints))
        for j in pose.joints:
            w.transform(j)
        w.u16(len(pose.capsules))
        for c in pose.capsules:
            w.f64(c.a.x, c.a.y, c.a.z, c.b.x, c.b.y, c.b.z, c.radius)
    return w.bytes()


def _decode_track(raw: bytes) -> MotionTrack:
    from .geom import Vec3

    r = ByteReader(raw)
    dt_ms = r.u16()
    poses = []
    for _ in range(r.u32()):
        root = r.transform()
        joints = tuple(r.transform() for _ in range(r.u16()))
        capsules = []
        for _ in range(r.u16()):
            ax, ay, az, bx, by, bz, rad = r.f64(7)
            capsules.append(Capsule(Vec3(ax, ay, az), Vec3(bx, by, bz), rad))
        poses.append(TrackPose(root, joints, tuple(capsules)))
    r.done()
    return MotionTrack(dt_ms=dt_ms, poses=tuple(poses))


def serialize_recording(rec: Recording) -> bytes:
    header = {
        "format_version": FORMAT_VERSION,
        "map_digest": rec.map_digest,
        "dt_ms": rec.dt_ms,
        "scenario": _scenario_to_json(rec.scenario),
        "created": rec.created,
        "snapshot_count": len(rec.snapshots),
        "stream_digest": hash_snapshot_stream(rec.snapshots),
        "has_motion": rec.motion_track is not None,
    }
    header_raw = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")

    parts = [MAGIC, struct.pack("<H", FORMAT_VERSION), struct.pack("<I", len(header_raw)), header_raw]
    for s in rec.snapshots:
        raw = encode_snapshot(s)
        parts.append(struct.pack("<BI", 1, len(raw)))
        parts.append(raw)
    if rec.motion_track is not None:
        raw = _encode_track(rec.motion_track)
        parts.append(struct.pack("<BI", 2, len(raw)))
        parts.append(raw)
    return b"".join(parts)


def deserialize_recording(data: bytes, verify: bool = True) -> Recording:
    if len(data) < len(MAGIC) + 6 or data[: len(MAGIC)] != MAGIC:
        raise RecordingFormatError("not a recording file (bad magic)")
    pos = len(MAGIC)
    (version,) = struct.unpack_from("<H", data, pos)
    pos += 2
    if version != FORMAT_VERSION:
        raise RecordingFormatError(f"unsupported recording version {version}, expected {FORMAT_VERSION}")
    (hlen,) = struct.unpack_from("<I", data, pos)
    pos += 4
    try:
        header = json.loads(data[pos : pos + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise RecordingFormatError(f"bad recording header: {e}") from e
    pos += hlen

    snapshots: list[WorldSnapshot] = []
    motion: MotionTrack | None = None
    while pos < len(data):
        if pos + 5 > len(data):
            raise RecordingFormatError("truncated chunk header")
        ctype, clen = struct.unpack_from("<BI", data, pos)
        pos += 5
        if pos + clen > len(data):
            raise RecordingFormatError("truncated chunk payload")
        payload = data[pos : pos + clen]
        pos += clen
        if ctype == 1:
            snapshots.append(decode_snapshot(payload))
        elif ctype == 2:
            motion = _decode_track(payload)
        else:
            raise RecordingFormatError(f"unknown chunk type {ctype}")

    if header.get("snapshot_count") != len(snapshots):
        raise CorruptionError(
            f"header declares {header.get('snapshot_count')} snapshots, file holds {len(snapshots)}"
        )
    if verify:
        digest = hash_snapshot_stream(snapshots)
        if digest != header.get("stream_digest"):
            raise CorruptionError("snapshot stream digest mismatch; recording is corrupt")

    rec = Recording(
        map_digest=header["map_digest"],
        dt_ms=header["dt_ms"],
        scenario=_scenario_from_json(header["scenario"]),
        created=header.get("created", {}),
        snapshots=snapshots,
        motion_track=motion,
    )
    return rec


def save_recording(rec: Recording, path: str | Path) -> None:
    Path(path).write_bytes(serialize_recording(rec))


def load_recording(path: str | Path, verify: bool = True) -> Recording:
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise PediloopError(f"cannot read recording {path}: {e}") from e
    try:
        return deserialize_recording(data, verify=verify)
    except struct.error as e:
        raise RecordingFormatError(f"truncated recording {path}: {e}") from e


@dataclass(frozen=True)
class TimingStats:
    mode: Mode
    tick_durations: tuple[float, ...]
    dt: float
    sensor_ops: int

    @property
    def achieved_fps(self) -> float:
        total = sum(self.tick_durations)
        return len(self.tick_durations) / total if total > 0.0 else float("inf")

    @property
    def budget_violations(self) -> int:
        return sum(1 for d in self.tick_durations if d > self.dt)


class TimingRecorder:
    """Collects per-tick wall durations for a run and the sensor-op count."""

    def __init__(self, mode: Mode, dt: float):
        self.mode = mode
        self.dt = dt
        self.durations: list[float] = []
        self.sensor_ops = 0

    def note_tick(self, duration: float) -> None:
        if duration < 0.0:
            raise ValueError("tick duration cannot be negative")
        self.durations.append(duration)

    def note_sensor_op(self) -> None:
        self.sensor_ops += 1


def measure_timing(run: TimingRecorder) -> TimingStats:
    """Summarize an instrumented run. Live runs must have been sensor-free."""
    if run.mode is Mode.LIVE and run.sensor_ops > 0:
        raise ModeViolationError(
            f"live run scheduled {run.sensor_ops} sensor operations; live mode is sensor-free"
        )
    return TimingStats(
        mode=run.mode,
        tick_durations=tuple(run.durations),
        dt=run.dt,
        sensor_ops=run.sensor_ops,
    )


def export_snapshots_text(rec: Recording, limit: int | None = None) -> Iterable[str]:
    """Line-delimited JSON export of the snapshot log, for inspection."""
    from .serialize import snapshot_to_jsonable

    for i, s in enumerate(rec.snapshots):
        if limit is not None and i >= limit:
            break
        yield json.dumps(snapshot_to_jsonable(s), sort_keys=True)


def recording_equal(a: Recording, b: Recording) -> bool:
    return (
        a.map_digest == b.map_digest
        and a.dt_ms == b.dt_ms
        and a.scenario == b.scenario
        and a.created == b.created
        and a.snapshots == b.snapshots
        and a.motion_track == b.motion_track
    )
