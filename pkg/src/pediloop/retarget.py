"""Clip-to-avatar conversion: forward kinematics, axis/unit mapping, and
retargeting onto the canonical avatar skeleton.

Mocap exports live in their own conventions (commonly Y-up centimeters);
the world is Z-up meters. An AxisMap is a signed axis permutation taking
clip axes to world axes; improper permutations (handedness flips) must be
declared explicitly. Rotation retargeting is by local-rotation transfer:
the clip joint's local rotation, conjugated into world axes, is applied to
the avatar joint of the same mapped name while the avatar keeps its own
bone lengths.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.transform import Rotation as R

from . import avatar
from .bvh import BvhClip, BvhJoint, resample_clip
from .errors import RetargetError
from .geom import Quat, Transform, Vec3
from .motiontrack import MotionTrack, TrackPose
from .worldsim.types import Capsule

_AXIS_VECTORS = {
    "x": (1.0, 0.0, 0.0),
    "y": (0.0, 1.0, 0.0),
    "z": (0.0, 0.0, 1.0),
    "-x": (-1.0, 0.0, 0.0),
    "-y": (0.0, -1.0, 0.0),
    "-z": (0.0, 0.0, -1.0),
}


@dataclass(frozen=True)
class AxisMap:
    """world_axis[i] = clip component named by tokens[i], e.g. ('x', '-z', 'y')
    reads: world x = clip x, world y = -clip z, world z = clip y."""

    tokens: tuple[str, str, str] = ("x", "-z", "y")
    mirror: bool = False  # must be set for improper (determinant -1) maps

    def __post_init__(self) -> None:
        axes = [t.lstrip("-") for t in self.tokens]
        if sorted(axes) != ["x", "y", "z"] or any(t not in _AXIS_VECTORS for t in self.tokens):
            raise RetargetError(f"axis map {self.tokens} is not a signed axis permutation")
        det = float(np.linalg.det(self.matrix()))
        if det > 0.0 and self.mirror:
            raise RetargetError("mirror flag set but axis map is a proper rotation")
        if det < 0.0 and not self.mirror:
            raise RetargetError(f"axis map {self.tokens} flips handedness; set mirror=True")

    def matrix(self) -> np.ndarray:
        return np.array([_AXIS_VECTORS[t] for t in self.tokens], dtype=float)

    def apply_point(self, p: np.ndarray) -> np.ndarray:
        return self.matrix() @ p

    def apply_rotation(self, rot: R) -> R:
        # M R M^T: proper for both rotations and reflections of M
        m = self.matrix()
        return R.from_matrix(m @ rot.as_matrix() @ m.T)


@dataclass(frozen=True)
class RetargetConfig:
    unit_scale: float = 0.01  # meters per clip unit (centimeter clips)
    axis_map: AxisMap = field(default_factory=AxisMap)
    joint_name_map: dict[str, str] = field(default_factory=dict)  # clip -> avatar

    def avatar_to_clip(self) -> dict[str, str]:
        return {v: k for k, v in self.joint_name_map.items()}


def identity_name_map() -> dict[str, str]:
    return {j.name: j.name for j in avatar.AVATAR_JOINTS}


def _local_pose(joint: BvhJoint, row: tuple[float, ...], base: int) -> tuple[np.ndarray, R]:
    """Local translation (clip units, offset plus position channels) and rotation."""
    t = np.array(joint.offset, dtype=float)
    angles: list[float] = []
    for ci, channel in enumerate(joint.channels):
        v = row[base + ci]
        if channel == "Xposition":
            t[0] += v
        elif channel == "Yposition":
            t[1] += v
        elif channel == "Zposition":
            t[2] += v
        else:
            angles.append(v)
    order = joint.rotation_order
    rot = R.from_euler(order, angles, degrees=True) if order else R.identity()
    return t, rot


def forward_kinematics(
    clip: BvhClip, frame_index: int, config: RetargetConfig
) -> tuple[list[Transform], list[Capsule]]:
    """World-space joint transforms of one frame, plus bone capsules.

    Capsule radii come from the avatar's per-bone table when the clip joint
    maps to an avatar joint, else the limb default.
    """
    if not 0 <= frame_index < len(clip.frames):
        raise IndexError(f"frame {frame_index} outside clip of {len(clip.frames)} frames")
    row = clip.frames[frame_index]
    sk = clip.skeleton

    positions: list[np.ndarray] = []
    rotations: list[R] = []
    for i, joint in enumerate(sk.joints):
        t, rot = _local_pose(joint, row, sk.channel_offset(i))
        t = t * config.unit_scale
        if joint.parent < 0:
            positions.append(t)
            rotations.append(rot)
        else:
            p_pos, p_rot = positions[joint.parent], rotations[joint.parent]
            positions.append(p_pos + p_rot.apply(t))
            rotations.append(p_rot * rot)

    transforms: list[Transform] = []
    for pos, rot in zip(positions, rotations):
        wp = config.axis_map.apply_point(pos)
        wr = config.axis_map.apply_rotation(rot)
        x, y, z, w = wr.as_quat()
        transforms.append(Transform(Vec3(*wp), Quat(w, x, y, z).normalized()))

    name_map = config.joint_name_map or identity_name_map()
    capsules: list[Capsule] = []
    for i, joint in enumerate(sk.joints):
        if joint.parent < 0:
            continue
        radius = avatar.BONE_RADII.get(name_map.get(joint.name, ""), 0.07)
        a = transforms[joint.parent].position
        b = transforms[i].position
        if (a - b).norm() == 0.0:
            continue  # zero-length bone carries no volume
        capsules.append(Capsule(a, b, radius))
    return transforms, capsules


def retarget_to_avatar(clip: BvhClip, config: RetargetConfig, dt_ms: int) -> MotionTrack:
    """Resample to the tick grid and transfer local rotations onto the avatar.

    Produces one TrackPose per tick: the clip root's mapped world transform,
    local avatar-joint transforms (avatar offsets, clip rotations), and
    root-relative collision capsules.
    """
    name_map = dict(config.joint_name_map) if config.joint_name_map else identity_name_map()
    to_clip = {v: k for k, v in name_map.items()}
    clip_names = {j.name for j in clip.skeleton.joints}
    missing = [j.name for j in avatar.AVATAR_JOINTS if to_clip.get(j.name) not in clip_names]
    if missing:
        raise RetargetError(f"avatar joints not covered by the clip mapping: {', '.join(missing)}")

    resampled = resample_clip(clip, dt_ms / 1000.0)
    sk = resampled.skeleton
    clip_index = {j.name: i for i, j in enumerate(sk.joints)}

    poses: list[TrackPose] = []
    for frame_index, row in enumerate(resampled.frames):
        locals_by_avatar: list[Transform] = []
        for aj in avatar.AVATAR_JOINTS:
            ci = clip_index[to_clip[aj.name]]
            joint = sk.joints[ci]
            _, rot = _local_pose(joint, row, sk.channel_offset(ci))
            wrot = config.axis_map.apply_rotation(rot)
            x, y, z, w = wrot.as_quat()
            locals_by_avatar.append(Transform(aj.offset, Quat(w, x, y, z).normalized()))
        root = _root_transform(resampled, row, config)
        world_joints = avatar.pose_world_joints(Transform.identity(), locals_by_avatar)
        capsules = tuple(Capsule(a, b, r) for a, b, r in avatar.build_capsules(world_joints))
        poses.append(TrackPose(root=root, joints=tuple(locals_by_avatar), capsules=capsules))

    return MotionTrack(dt_ms=dt_ms, poses=tuple(poses))


def _root_transform(clip: BvhClip, row: tuple[float, ...], config: RetargetConfig) -> Transform:
    root_joint = clip.skeleton.joints[0]
    t, rot = _local_pose(root_joint, row, 0)
    wp = config.axis_map.apply_point(t * config.unit_scale)
    wr = config.axis_map.apply_rotation(rot)
    x, y, z, w = wr.as_quat()
    return Transform(Vec3(*wp), Quat(w, x, y, z).normalized())
