"""Snapshot wire formats.

Two encodings of WorldSnapshot exist on purpose:

* a canonical little-endian binary form (encode_snapshot/decode_snapshot)
  used for recordings and stream hashing — byte-deterministic: equal
  snapshots always serialize to equal bytes;
* a JSON form (snapshot_to_jsonable/snapshot_from_jsonable) used on the
  network protocol and for text export — floats survive a round trip via
  repr, but byte stability is not promised here.
"""
from __future__ import annotations

import struct
from typing import Any

from .errors import RecordingFormatError
from .geom import Quat, Transform, Vec3
from .worldsim.types import (
    AudioLevel,
    BehaviorFlags,
    Capsule,
    EhmiColor,
    EhmiState,
    EventKind,
    ScenarioEvent,
    ScenarioPhase,
    VehicleDims,
    VehicleState,
    WalkerState,
    WorldSnapshot,
)

_PHASE_CODE = {
    ScenarioPhase.WAITING: 0,
    ScenarioPhase.VEHICLE_APPROACHING: 1,
    ScenarioPhase.PEDESTRIAN_CROSSING: 2,
    ScenarioPhase.DONE: 3,
}
_PHASE_FROM = {v: k for k, v in _PHASE_CODE.items()}

_COLOR_CODE = {EhmiColor.OFF: 0, EhmiColor.CYAN: 1}
_COLOR_FROM = {v: k for k, v in _COLOR_CODE.items()}

_EVENT_CODE = {
    EventKind.VEHICLE_YIELDING: 0,
    EventKind.EHMI_CHANGED: 1,
    EventKind.PHASE_CHANGED: 2,
    EventKind.OUT_OF_PLAY_AREA: 3,
    EventKind.COLLISION: 4,
}
_EVENT_FROM = {v: k for k, v in _EVENT_CODE.items()}


class ByteWriter:
    def __init__(self) -> None:
        self.parts: list[bytes] = []

    def u8(self, v: int) -> None:
        self.parts.append(struct.pack("<B", v))

    def u16(self, v: int) -> None:
        self.parts.append(struct.pack("<H", v))

    def u32(self, v: int) -> None:
        self.parts.append(struct.pack("<I", v))

    def i32(self, v: int) -> None:
        self.parts.append(struct.pack("<i", v))

    def u64(self, v: int) -> None:
        self.parts.append(struct.pack("<Q", v))

    def f64(self, *vs: float) -> None:
        self.parts.append(struct.pack(f"<{len(vs)}d", *vs))

    def text(self, s: str) -> None:
        raw = s.encode("utf-8")
        self.u16(len(raw))
        self.parts.append(raw)

    def transform(self, t: Transform) -> None:
        p, q = t.position, t.orientation
        self.f64(p.x, p.y, p.z, q.w, q.x, q.y, q.z)

    def bytes(self) -> bytes:
        return b"".join(self.parts)


class ByteReader:
    def __init__(self, data: bytes) -> None:
        self.data = data
        self.pos = 0

    def _unpack(self, fmt: str):
        size = struct.calcsize(fmt)
        if self.pos + size > len(self.data):
            raise RecordingFormatError(f"snapshot truncated at byte {self.pos}")
        out = struct.unpack_from(fmt, self.data, self.pos)
        self.pos += size
        return out

    def u8(self) -> int:
        return self._unpack("<B")[0]

    def u16(self) -> int:
        return self._unpack("<H")[0]

    def u32(self) -> int:
        return self._unpack("<I")[0]

    def i32(self) -> int:
        return self._unpack("<i")[0]

    def u64(self) -> int:
        return self._unpack("<Q")[0]

    def f64(self, n: int = 1):
        out = self._unpack(f"<{n}d")
        return out[0] if n == 1 else out

    def text(self) -> str:
        n = self.u16()
        if self.pos + n > len(self.data):
            raise RecordingFormatError(f"snapshot truncated at byte {self.pos}")
        raw = self.data[self.pos : self.pos + n]
        self.pos += n
        return raw.decode("utf-8")

    def transform(self) -> Transform:
        px, py, pz, qw, qx, qy, qz = self.f64(7)
        return Transform(Vec3(px, py, pz), Quat(qw, qx, qy, qz))

    def done(self) -> None:
        if self.pos != len(self.data):
            raise RecordingFormatError(f"{len(self.data) - self.pos} trailing bytes after snapshot")


def encode_snapshot(s: WorldSnapshot) -> bytes:
    w = ByteWriter()
    w.u64(s.tick)
    w.f64(s.sim_time)
    w.u8(_PHASE_CODE[s.scenario_phase])

    w.u16(len(s.vehicles))
    for v in s.vehicles:
        w.u32(v.id)
        w.transform(v.transform)
        w.f64(v.speed, v.throttle, v.brake, v.steer)
        w.u8(1 if v.ehmi.activated else 0)
        w.u8(_COLOR_CODE[v.ehmi.color])
        w.f64(v.behavior.speed_limit)
        w.u8(1 if v.behavior.ignore_pedestrians else 0)
        w.u8(1 if v.behavior.ignore_traffic_lights else 0)
        w.f64(v.dims.length, v.dims.width, v.dims.height)

    w.u32(s.walker.id)
    w.transform(s.walker.root)
    w.u16(len(s.walker.joints))
    for j in s.walker.joints:
        w.transform(j)
    w.u16(len(s.walker.capsules))
    for c in s.walker.capsules:
        w.f64(c.a.x, c.a.y, c.a.z, c.b.x, c.b.y, c.b.z, c.radius)

    w.u16(len(s.audio_levels))
    for actor_id, lvl in s.audio_levels:
        w.u32(actor_id)
        w.f64(lvl.level, lvl.pan)
    w.f64(s.ambient_level)

    w.u16(len(s.events))
    for e in s.events:
        w.u8(_EVENT_CODE[e.kind])
        w.i32(e.actor_id)
        w.text(e.detail)
    return w.bytes()


def decode_snapshot(data: bytes) -> WorldSnapshot:
    r = ByteReader(data)
    tick = r.u64()
    sim_time = r.f64()
    phase_code = r.u8()
    if phase_code not in _PHASE_FROM:
        raise RecordingFormatError(f"unknown phase code {phase_code}")
    phase = _PHASE_FROM[phase_code]

    vehicles = []
    for _ in range(r.u16()):
        vid = r.u32()
        transform = r.transform()
        speed, throttle, brake, steer = r.f64(4)
        activated = bool(r.u8())
        color = _COLOR_FROM[r.u8()]
        speed_limit = r.f64()
        ignore_peds = bool(r.u8())
        ignore_lights = bool(r.u8())
        length, width, height = r.f64(3)
        vehicles.append(
            VehicleState(
                id=vid,
                transform=transform,
                speed=speed,
                throttle=throttle,
                brake=brake,
                steer=steer,
                ehmi=EhmiState(activated, color),
                behavior=BehaviorFlags(speed_limit, ignore_peds, ignore_lights),
                dims=VehicleDims(length, width, height),
            )
        )

    wid = r.u32()
    root = r.transform()
    joints = tuple(r.transform() for _ in range(r.u16()))
    capsules = []
    for _ in range(r.u16()):
        ax, ay, az, bx, by, bz, radius = r.f64(7)
        capsules.append(Capsule(Vec3(ax, ay, az), Vec3(bx, by, bz), radius))
    walker = WalkerState(wid, root, joints, tuple(capsules))

    audio = []
    for _ in range(r.u16()):
        actor_id = r.u32()
        level, pan = r.f64(2)
        audio.append((actor_id, AudioLevel(level, pan)))
    ambient = r.f64()

    events = []
    for _ in range(r.u16()):
        code = r.u8()
        if code not in _EVENT_FROM:
            raise RecordingFormatError(f"unknown event code {code}")
        actor = r.i32()
        detail = r.text()
        events.append(ScenarioEvent(_EVENT_FROM[code], actor, detail))
    r.done()

    return WorldSnapshot(
        tick=tick,
        sim_time=sim_time,
        vehicles=tuple(vehicles),
        walker=walker,
        scenario_phase=phase,
        audio_levels=tuple(audio),
        ambient_level=ambient,
        events=tuple(events),
    )


def _transform_to_json(t: Transform) -> dict[str, Any]:
    return {
        "pos": [t.position.x, t.position.y, t.position.z],
        "quat": [t.orientation.w, t.orientation.x, t.orientation.y, t.orientation.z],
    }


def _transform_from_json(d: dict[str, Any]) -> Transform:
    px, py, pz = d["pos"]
    qw, qx, qy, qz = d["quat"]
    return Transform(Vec3(px, py, pz), Quat(qw, qx, qy, qz))


def snapshot_to_jsonable(s: WorldSnapshot) -> dict[str, Any]:
    return {
        "tick": s.tick,
        "sim_time": s.sim_time,
        "phase": s.scenario_phase.value,
        "vehicles": [
            {
                "id": v.id,
                **_transform_to_json(v.transform),
                "speed": v.speed,
                "throttle": v.throttle,
                "brake": v.brake,
                "steer": v.steer,
                "ehmi": {"activated": v.ehmi.activated, "color": v.ehmi.color.value},
                "behavior": {
                    "speed_limit": v.behavior.speed_limit,
                    "ignore_pedestrians": v.behavior.ignore_pedestrians,
                    "ignore_traffic_lights": v.behavior.ignore_traffic_lights,
                },
                "dims": [v.dims.length, v.dims.width, v.dims.height],
            }
            for v in s.vehicles
        ],
        "walker": {
            "id": s.walker.id,
            "root": _transform_to_json(s.walker.root),
            "joints": [_transform_to_json(j) for j in s.walker.joints],
            "capsules": [[c.a.x, c.a.y, c.a.z, c.b.x, c.b.y, c.b.z, c.radius] for c in s.walker.capsules],
        },
        "audio": [[actor_id, lvl.level, lvl.pan] for actor_id, lvl in s.audio_levels],
        "ambient": s.ambient_level,
        "events": [{"kind": e.kind.value, "actor": e.actor_id, "detail": e.detail} for e in s.events],
    }


def snapshot_from_jsonable(d: dict[str, Any]) -> WorldSnapshot:
    vehicles = tuple(
        VehicleState(
            id=v["id"],
            transform=_transform_from_json(v),
            speed=v["speed"],
            throttle=v["throttle"],
            brake=v["brake"],
            steer=v["steer"],
            ehmi=EhmiState(v["ehmi"]["activated"], EhmiColor(v["ehmi"]["color"])),
            behavior=BehaviorFlags(
                v["behavior"]["speed_limit"],
                v["behavior"]["ignore_pedestrians"],
                v["behavior"]["ignore_traffic_lights"],
            ),
            dims=VehicleDims(*v["dims"]),
        )
        for v in d["vehicles"]
    )
    wd = d["walker"]
    walker = WalkerState(
        id=wd["id"],
        root=_transform_from_json(wd["root"]),
        joints=tuple(_transform_from_json(j) for j in wd["joints"]),
        capsules=tuple(
            Capsule(Vec3(c[0], c[1], c[2]), Vec3(c[3], c[4], c[5]), c[6]) for c in wd["capsules"]
        ),
    )
    return WorldSnapshot(
        tick=d["tick"],
        sim_time=d["sim_time"],
        vehicles=vehicles,
        walker=walker,
        scenario_phase=ScenarioPhase(d["phase"]),
        audio_levels=tuple((a[0], AudioLevel(a[1], a[2])) for a in d["audio"]),
        ambient_level=d["ambient"],
        events=tuple(
            ScenarioEvent(EventKind(e["kind"]), e["actor"], e["detail"]) for e in d["events"]
        ),
    )
