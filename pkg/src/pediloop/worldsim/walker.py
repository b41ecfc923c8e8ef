"""Walker avatar updates from tracked pose or keyboard walk intent.

Head-pose input drives the root through the play-area affine map, with a
small deadzone so HMD jitter does not shake the avatar. A full-body joint
list, when present in the feed, overwrites the articulation directly. The
keyboard fallback integrates velocity intents instead. Either way the root
is confined to the play area; leaving it clamps to the boundary and signals
OutOfPlayArea.
"""
from __future__ import annotations

import math
from dataclasses import replace

from .. import avatar
from ..errors import PoseFormatError, SessionError
from ..geom import Quat, Transform, Vec3
from .types import (
    EventKind,
    PlayArea,
    PoseInput,
    ScenarioEvent,
    WalkerState,
    WalkIntent,
)

TRANSLATION_DEADZONE = 0.02  # m
ROTATION_DEADZONE = math.radians(2.0)

MAX_WALK_SPEED = 3.0  # m/s cap on keyboard locomotion
MAX_TURN_RATE = math.radians(180.0)


def make_walker(walker_id: int, x: float, y: float, yaw: float) -> WalkerState:
    """Bind-pose walker standing at a ground point."""
    root = Transform(Vec3(x, y, 0.0), Quat.from_yaw(yaw))
    joints = tuple(avatar.bind_pose())
    return replace_capsules(WalkerState(walker_id, root, joints, ()))


def replace_capsules(w: WalkerState) -> WalkerState:
    """Recompute world-space collision capsules from root + local joints."""
    world_joints = avatar.pose_world_joints(w.root, list(w.joints))
    capsules = tuple(
        _capsule(a, b, r) for a, b, r in avatar.build_capsules(world_joints)
    )
    return replace(w, capsules=capsules)


def _capsule(a: Vec3, b: Vec3, r: float):
    from .types import Capsule

    return Capsule(a, b, r)


def update_walker_from_input(
    w: WalkerState,
    pose: PoseInput,
    area: PlayArea,
    last_applied_head: Transform | None,
) -> tuple[WalkerState, Transform | None, list[ScenarioEvent]]:
    """Apply one head-pose sample.

    Returns (new walker, head pose that now counts as "applied", events).
    Samples inside the deadzone leave the root untouched and do not replace
    the applied pose, so slow drift eventually accumulates past threshold.
    """
    if pose.avatar_id is not None and pose.avatar_id != w.id:
        raise SessionError(f"pose input for unknown avatar {pose.avatar_id}")

    events: list[ScenarioEvent] = []
    new_w = w
    applied = last_applied_head

    moved = True
    if last_applied_head is not None:
        delta_t = (pose.head.position - last_applied_head.position).norm()
        delta_r = pose.head.orientation.angle_to(last_applied_head.orientation)
        moved = delta_t >= TRANSLATION_DEADZONE or delta_r >= ROTATION_DEADZONE

    if moved:
        tx, ty = pose.head.position.x, pose.head.position.y
        wx, wy = area.tracking_to_world(tx, ty)
        if not area.world_rect.contains(wx, wy):
            wx, wy = area.world_rect.clamp(wx, wy)
            events.append(ScenarioEvent(EventKind.OUT_OF_PLAY_AREA, w.id))
        yaw = pose.head.orientation.yaw() + area.world_rect.yaw
        root = Transform(Vec3(wx, wy, 0.0), Quat.from_yaw(yaw))
        new_w = replace(new_w, root=root)
        applied = pose.head

    if pose.body_joints is not None:
        if len(pose.body_joints) != avatar.JOINT_COUNT:
            raise PoseFormatError(
                f"body pose carries {len(pose.body_joints)} joints, avatar has {avatar.JOINT_COUNT}"
            )
        joints = tuple(
            Transform(j.offset, q) for j, q in zip(avatar.AVATAR_JOINTS, pose.body_joints)
        )
        new_w = replace(new_w, joints=joints)

    if new_w is w:
        return w, applied, events
    return replace_capsules(new_w), applied, events


def update_walker_from_walk(
    w: WalkerState,
    intent: WalkIntent,
    area: PlayArea,
    dt: float,
) -> tuple[WalkerState, list[ScenarioEvent]]:
    """Integrate a keyboard walk intent over one tick."""
    if intent.avatar_id is not None and intent.avatar_id != w.id:
        raise SessionError(f"walk intent for unknown avatar {intent.avatar_id}")

    forward = min(max(intent.forward, -MAX_WALK_SPEED), MAX_WALK_SPEED)
    strafe = min(max(intent.strafe, -MAX_WALK_SPEED), MAX_WALK_SPEED)
    turn = min(max(intent.turn, -MAX_TURN_RATE), MAX_TURN_RATE)
    if forward == 0.0 and strafe == 0.0 and turn == 0.0:
        return w, []

    yaw = w.root.orientation.yaw() + turn * dt
    c, s = math.cos(yaw), math.sin(yaw)
    dx = (forward * c - strafe * s) * dt
    dy = (forward * s + strafe * c) * dt
    x = w.root.position.x + dx
    y = w.root.position.y + dy

    events: list[ScenarioEvent] = []
    if not area.world_rect.contains(x, y):
        x, y = area.world_rect.clamp(x, y)
        events.append(ScenarioEvent(EventKind.OUT_OF_PLAY_AREA, w.id))

    root = Transform(Vec3(x, y, 0.0), Quat.from_yaw(yaw))
    return replace_capsules(replace(w, root=root)), events
