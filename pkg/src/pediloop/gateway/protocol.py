"""Line-delimited message protocol spoken over TCP and, frame-for-frame,
over WebSocket.

Every message is one JSON object per line/frame with a "tag" discriminator
and a "v" protocol version. Decoding is total: any byte sequence either
yields a Message or raises DecodeError (UnknownTagError for well-formed
frames with an unrecognized tag) — never anything else. Unknown fields are
ignored for forward compatibility.

The full schema with byte-level examples lives in PROTOCOL.md.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

from ..errors import DecodeError, UnknownTagError
from ..geom import OrientedRect2, Quat, Rect2, Transform, Vec3
from ..serialize import snapshot_from_jsonable, snapshot_to_jsonable
from ..worldsim.types import (
    EventKind,
    PlayArea,
    PoseInput,
    ScenarioEvent,
    WalkIntent,
    WorldSnapshot,
)

PROTOCOL_VERSION = "1"

ROLE_PEDESTRIAN = "pedestrian"
ROLE_SPECTATOR = "spectator"
_ROLES = (ROLE_PEDESTRIAN, ROLE_SPECTATOR)


@dataclass(frozen=True)
class Hello:
    role: str
    name: str = ""


@dataclass(frozen=True)
class Ack:
    avatar_id: int  # -1 for spectators
    map_digest: str
    dt_ms: int
    play_area: PlayArea


@dataclass(frozen=True)
class Pose:
    pose: PoseInput


@dataclass(frozen=True)
class Walk:
    intent: WalkIntent


@dataclass(frozen=True)
class ScenarioCmd:
    action: str  # "start" | "reset"
    overrides: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class Snapshot:
    snapshot: WorldSnapshot


@dataclass(frozen=True)
class Event:
    event: ScenarioEvent


@dataclass(frozen=True)
class Error:
    code: str
    detail: str = ""


Message = Hello | Ack | Pose | Walk | ScenarioCmd | Snapshot | Event | Error


def _transform_json(t: Transform) -> dict:
    return {
        "pos": [t.position.x, t.position.y, t.position.z],
        "quat": [t.orientation.w, t.orientation.x, t.orientation.y, t.orientation.z],
    }


def _transform_parse(d: Any) -> Transform:
    px, py, pz = (_num(v) for v in d["pos"])
    qw, qx, qy, qz = (_num(v) for v in d["quat"])
    return Transform(Vec3(px, py, pz), Quat(qw, qx, qy, qz))


def _num(v: Any) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValueError(f"expected a number, got {v!r}")
    f = float(v)
    if not math.isfinite(f):
        raise ValueError(f"expected a finite number, got {v!r}")
    return f


def _play_area_json(a: PlayArea) -> dict:
    t, w = a.tracking_rect, a.world_rect
    return {
        "tracking": [t.min_x, t.min_y, t.width, t.height],
        "world": [w.anchor_x, w.anchor_y, w.yaw, w.width, w.height],
    }


def _play_area_parse(d: Any) -> PlayArea:
    t = [_num(v) for v in d["tracking"]]
    w = [_num(v) for v in d["world"]]
    return PlayArea(Rect2(t[0], t[1], t[2], t[3]), OrientedRect2(w[0], w[1], w[2], w[3], w[4]))


def encode_message(m: Message) -> bytes:
    """One message as one JSON line (no trailing newline; framing adds it)."""
    body: dict[str, Any]
    if isinstance(m, Hello):
        body = {"tag": "hello", "role": m.role, "name": m.name}
    elif isinstance(m, Ack):
        body = {
            "tag": "ack",
            "avatar_id": m.avatar_id,
            "map_digest": m.map_digest,
            "dt_ms": m.dt_ms,
            "play_area": _play_area_json(m.play_area),
        }
    elif isinstance(m, Pose):
        p = m.pose
        body = {
            "tag": "pose",
            "head": _transform_json(p.head),
            "hands": [None if h is None else _transform_json(h) for h in p.hands],
            "joints": None
            if p.body_joints is None
            else [[q.w, q.x, q.y, q.z] for q in p.body_joints],
            "t": p.timestamp,
        }
    elif isinstance(m, Walk):
        body = {
            "tag": "walk",
            "forward": m.intent.forward,
            "strafe": m.intent.strafe,
            "turn": m.intent.turn,
        }
    elif isinstance(m, ScenarioCmd):
        body = {"tag": "scenario", "action": m.action, "overrides": m.overrides}
    elif isinstance(m, Snapshot):
        body = {"tag": "snapshot", "snapshot": snapshot_to_jsonable(m.snapshot)}
    elif isinstance(m, Event):
        e = m.event
        body = {"tag": "event", "kind": e.kind.value, "actor": e.actor_id, "detail": e.detail}
    elif isinstance(m, Error):
        body = {"tag": "error", "code": m.code, "detail": m.detail}
    else:
        raise TypeError(f"not a protocol message: {m!r}")
    body["v"] = PROTOCOL_VERSION
    return json.dumps(body, separators=(",", ":"), sort_keys=True).encode("utf-8")


def decode_message(raw: bytes) -> Message:
    """Decode one complete line/frame. Raises DecodeError (or the
    UnknownTagError subclass) for anything that is not a valid message."""
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as e:
        raise DecodeError(f"frame is not valid UTF-8: {e.reason}", e.start) from e
    try:
        body = json.loads(text)
    except json.JSONDecodeError as e:
        raise DecodeError(f"frame is not valid JSON: {e.msg}", e.pos) from e
    if not isinstance(body, dict):
        raise DecodeError(f"frame must be a JSON object, got {type(body).__name__}")

    version = body.get("v")
    if version is None:
        raise DecodeError("frame is missing the protocol version field 'v'")
    if version != PROTOCOL_VERSION:
        raise DecodeError(f"unsupported protocol version {version!r}")

    tag = body.get("tag")
    if not isinstance(tag, str):
        raise DecodeError("frame is missing a string 'tag'")

    try:
        return _decode_body(tag, body)
    except UnknownTagError:
        raise
    except DecodeError:
        raise
    except (KeyError, IndexError, TypeError, ValueError) as e:
        raise DecodeError(f"bad '{tag}' message: {e}") from e


def _decode_body(tag: str, body: dict) -> Message:
    if tag == "hello":
        role = body["role"]
        if role not in _ROLES:
            raise DecodeError(f"unknown role {role!r}")
        name = body.get("name", "")
        if not isinstance(name, str):
            raise DecodeError("hello name must be a string")
        return Hello(role=role, name=name)
    if tag == "ack":
        return Ack(
            avatar_id=int(body["avatar_id"]),
            map_digest=str(body["map_digest"]),
            dt_ms=int(body["dt_ms"]),
            play_area=_play_area_parse(body["play_area"]),
        )
    if tag == "pose":
        hands_raw = body.get("hands", [None, None])
        if not isinstance(hands_raw, list) or len(hands_raw) != 2:
            raise DecodeError("pose hands must be a 2-element list")
        joints_raw = body.get("joints")
        joints = None
        if joints_raw is not None:
            joints = tuple(Quat(_num(q[0]), _num(q[1]), _num(q[2]), _num(q[3])) for q in joints_raw)
        return Pose(
            PoseInput(
                head=_transform_parse(body["head"]),
                timestamp=_num(body["t"]),
                hands=tuple(None if h is None else _transform_parse(h) for h in hands_raw),
                body_joints=joints,
            )
        )
    if tag == "walk":
        return Walk(
            WalkIntent(
                forward=_num(body.get("forward", 0.0)),
                strafe=_num(body.get("strafe", 0.0)),
                turn=_num(body.get("turn", 0.0)),
            )
        )
    if tag == "scenario":
        action = body["action"]
        if action not in ("start", "reset"):
            raise DecodeError(f"unknown scenario action {action!r}")
        overrides = body.get("overrides", {})
        if not isinstance(overrides, dict):
            raise DecodeError("scenario overrides must be an object")
        return ScenarioCmd(action=action, overrides=overrides)
    if tag == "snapshot":
        return Snapshot(snapshot_from_jsonable(body["snapshot"]))
    if tag == "event":
        return Event(
            ScenarioEvent(
                kind=EventKind(body["kind"]),
                actor_id=int(body["actor"]),
                detail=str(body.get("detail", "")),
            )
        )
    if tag == "error":
        return Error(code=str(body["code"]), detail=str(body.get("detail", "")))
    raise UnknownTagError(tag)
