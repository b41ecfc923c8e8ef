"""Canonical pedestrian avatar skeleton.

A fixed 17-joint humanoid used for the walker actor: the live simulation
poses it (bind pose unless a mocap feed supplies joint rotations), and
motion-clip retargeting maps captured skeletons onto it. Offsets are meters
in the world convention (Z up), bind pose standing at the origin facing +X.
"""
from __future__ import annotations

from dataclasses import dataclass

from .geom import Quat, Transform, Vec3


@dataclass(frozen=True)
class AvatarJoint:
    name: str
    parent: int  # -1 for the root joint
    offset: Vec3  # rest translation relative to the parent joint


# Topological order (parent before child), root first.
AVATAR_JOINTS: tuple[AvatarJoint, ...] = (
    AvatarJoint("Hips", -1, Vec3(0.0, 0.0, 0.95)),
    AvatarJoint("Spine", 0, Vec3(0.0, 0.0, 0.15)),
    AvatarJoint("Chest", 1, Vec3(0.0, 0.0, 0.25)),
    AvatarJoint("Neck", 2, Vec3(0.0, 0.0, 0.20)),
    AvatarJoint("Head", 3, Vec3(0.0, 0.0, 0.18)),
    AvatarJoint("LeftArm", 2, Vec3(0.0, 0.22, 0.12)),
    AvatarJoint("LeftForeArm", 5, Vec3(0.0, 0.28, 0.0)),
    AvatarJoint("LeftHand", 6, Vec3(0.0, 0.26, 0.0)),
    AvatarJoint("RightArm", 2, Vec3(0.0, -0.22, 0.12)),
    AvatarJoint("RightForeArm", 8, Vec3(0.0, -0.28, 0.0)),
    AvatarJoint("RightHand", 9, Vec3(0.0, -0.26, 0.0)),
    AvatarJoint("LeftUpLeg", 0, Vec3(0.0, 0.10, -0.05)),
    AvatarJoint("LeftLeg", 11, Vec3(0.0, 0.0, -0.43)),
    AvatarJoint("LeftFoot", 12, Vec3(0.0, 0.0, -0.43)),
    AvatarJoint("RightUpLeg", 0, Vec3(0.0, -0.10, -0.05)),
    AvatarJoint("RightLeg", 14, Vec3(0.0, 0.0, -0.43)),
    AvatarJoint("RightFoot", 15, Vec3(0.0, 0.0, -0.43)),
)

JOINT_COUNT = len(AVATAR_JOINTS)
JOINT_INDEX = {j.name: i for i, j in enumerate(AVATAR_JOINTS)}

# Collision capsule radius per bone, keyed by the child joint of the bone.
_HEAD_R = 0.12
_TORSO_R = 0.18
_LIMB_R = 0.07
BONE_RADII: dict[str, float] = {
    "Spine": _TORSO_R,
    "Chest": _TORSO_R,
    "Neck": _TORSO_R,
    "Head": _HEAD_R,
    "LeftArm": _LIMB_R,
    "LeftForeArm": _LIMB_R,
    "LeftHand": _LIMB_R,
    "RightArm": _LIMB_R,
    "RightForeArm": _LIMB_R,
    "RightHand": _LIMB_R,
    "LeftUpLeg": _LIMB_R,
    "LeftLeg": _LIMB_R,
    "LeftFoot": _LIMB_R,
    "RightUpLeg": _LIMB_R,
    "RightLeg": _LIMB_R,
    "RightFoot": _LIMB_R,
}


def bind_pose() -> list[Transform]:
    """Local joint transforms of the rest pose (offsets, identity rotations)."""
    return [Transform(j.offset, Quat.identity()) for j in AVATAR_JOINTS]


def pose_world_joints(root: Transform, local_joints: list[Transform]) -> list[Transform]:
    """Chain local joint transforms under a world root transform."""
    if len(local_joints) != JOINT_COUNT:
        raise ValueError(f"expected {JOINT_COUNT} joints, got {len(local_joints)}")
    world: list[Transform] = []
    for i, joint in enumerate(AVATAR_JOINTS):
        parent = root if joint.parent < 0 else world[joint.parent]
        world.append(parent.compose(local_joints[i]))
    return world


def build_capsules(world_joints: list[Transform]) -> list[tuple[Vec3, Vec3, float]]:
    """One capsule per bone: (parent joint position, child joint position, radius)."""
    capsules: list[tuple[Vec3, Vec3, float]] = []
    for i, joint in enumerate(AVATAR_JOINTS):
        if joint.parent < 0:
            continue
        a = world_joints[joint.parent].position
        b = world_joints[i].position
        capsules.append((a, b, BONE_RADII[joint.name]))
    return capsules
