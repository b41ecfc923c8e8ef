import itertools

import numpy as np
import pytest

from pediloop import avatar
from pediloop.bvh import BvhClip, BvhJoint, BvhSkeleton, parse_bvh
from pediloop.errors import RetargetError
from pediloop.retarget import AxisMap, RetargetConfig, forward_kinematics, identity_name_map, retarget_to_avatar


def two_bone_clip(root_rotation=(0.0, 0.0, 0.0), frame_count=1, unit_offsets=True):
    """ROOT -> child chain, offsets (0, 1, 0) in clip units."""
    off = (0.0, 1.0, 0.0) if unit_offsets else (0.0, 2.0, 0.0)
    sk = BvhSkeleton(
        (
            BvhJoint("Hips", -1, (0.0, 0.0, 0.0), ("Xposition", "Yposition", "Zposition", "Zrotation", "Xrotation", "Yrotation")),
            BvhJoint("Child", 0, off, ("Zrotation", "Xrotation", "Yrotation")),
        )
    )
    z, x, y = root_rotation
    frames = tuple((0.0, 0.0, 0.0, z, x, y, 0.0, 0.0, 0.0) for _ in range(frame_count))
    return BvhClip(skeleton=sk, frame_time=0.01, frames=frames)


def identity_config(unit_scale=1.0):
    return RetargetConfig(unit_scale=unit_scale, axis_map=AxisMap(("x", "y", "z")))


def test_zero_rotations_cumulative_offsets():
    clip = two_bone_clip()
    transforms, capsules = forward_kinematics(clip, 0, identity_config())
    assert transforms[0].position.y == pytest.approx(0.0)
    assert transforms[1].position.y == pytest.approx(1.0)
    assert len(capsules) == 1


def test_unit_scale_linear():
    clip = two_bone_clip()
    full, _ = forward_kinematics(clip, 0, identity_config(unit_scale=1.0))
    hundredth, _ = forward_kinematics(clip, 0, identity_config(unit_scale=0.01))
    for a, b in zip(full, hundredth):
        assert b.position.x == pytest.approx(a.position.x / 100.0, abs=1e-15)
        assert b.position.y == pytest.approx(a.position.y / 100.0, abs=1e-15)
        assert b.position.z == pytest.approx(a.position.z / 100.0, abs=1e-15)


def test_two_bone_ninety_degree_roll_hand_computed():
    # 90 degrees about clip Z: hand-computed matrix product oracle
    clip = two_bone_clip(root_rotation=(90.0, 0.0, 0.0))
    transforms, _ = forward_kinematics(clip, 0, identity_config())
    rz = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
    expected = rz @ np.array([0.0, 1.0, 0.0])
    got = transforms[1].position
    assert np.allclose([got.x, got.y, got.z], expected, atol=1e-12)


def test_axis_map_default_maps_yup_to_zup():
    clip = two_bone_clip()  # child 1 unit along clip Y (up)
    transforms, _ = forward_kinematics(clip, 0, RetargetConfig(unit_scale=1.0))
    got = transforms[1].position
    assert (got.x, got.y, got.z) == pytest.approx((0.0, 0.0, 1.0), abs=1e-12)


def test_axis_map_rejects_bad_tokens():
    with pytest.raises(RetargetError):
        AxisMap(("x", "x", "y"))
    with pytest.raises(RetargetError):
        AxisMap(("x", "q", "z"))


def test_axis_map_handedness_flag():
    with pytest.raises(RetargetError):
        AxisMap(("x", "z", "y"))  # improper without the flag
    AxisMap(("x", "z", "y"), mirror=True)  # declared flip is fine
    with pytest.raises(RetargetError):
        AxisMap(("x", "-z", "y"), mirror=True)  # proper map must not claim mirror


def test_axis_map_orthogonality_all_permutations():
    for perm in itertools.permutations("xyz"):
        for signs in itertools.product((1, -1), repeat=3):
            tokens = tuple(("-" if s < 0 else "") + a for a, s in zip(perm, signs))
            m = np.array([[1.0 if t == a else (-1.0 if t == "-" + a else 0.0) for a in "xyz"] for t in tokens])
            det = np.linalg.det(m)
            amap = AxisMap(tokens, mirror=det < 0.0)
            assert np.allclose(amap.matrix() @ amap.matrix().T, np.eye(3), atol=1e-9)


def test_identity_pose_retargets_to_bind_pose(walk_clip_text):
    clip = parse_bvh(walk_clip_text)
    # zero out all channels: identity articulation
    zero = tuple(tuple(0.0 for _ in row) for row in clip.frames[:3])
    still = BvhClip(skeleton=clip.skeleton, frame_time=clip.frame_time, frames=zero)
    track = retarget_to_avatar(still, RetargetConfig(), 55)
    bind = avatar.bind_pose()
    for pose in track.poses:
        for got, want in zip(pose.joints, bind):
            assert (got.position - want.position).norm() < 1e-12
            assert got.orientation.angle_to(want.orientation) < 1e-9


def test_bundled_clip_root_path_is_continuous(walk_clip_text):
    clip = parse_bvh(walk_clip_text)
    track = retarget_to_avatar(clip, RetargetConfig(), 55)
    for a, b in zip(track.poses, track.poses[1:]):
        step = (b.root.position - a.root.position).norm()
        assert step < 0.2  # 3.6 m/s sprint bound at 55 ms ticks


def test_fk_bone_length_rigidity(walk_clip_text):
    clip = parse_bvh(walk_clip_text)
    cfg = RetargetConfig()
    reference: dict[int, float] = {}
    for frame in range(0, len(clip.frames), 150):
        transforms, _ = forward_kinematics(clip, frame, cfg)
        for i, joint in enumerate(clip.skeleton.joints):
            if joint.parent < 0:
                continue
            length = (transforms[i].position - transforms[joint.parent].position).norm()
            if i not in reference:
                reference[i] = length
            else:
                assert abs(length - reference[i]) <= 1e-6 * max(reference[i], 1e-9)


def test_missing_joint_mapping_is_named(walk_clip_text):
    clip = parse_bvh(walk_clip_text)
    name_map = identity_name_map()
    del name_map["LeftFoot"]
    cfg = RetargetConfig(joint_name_map=name_map)
    with pytest.raises(RetargetError) as err:
        retarget_to_avatar(clip, cfg, 55)
    assert "LeftFoot" in str(err.value)


def test_track_capsules_are_root_relative(walk_clip_text):
    clip = parse_bvh(walk_clip_text)
    track = retarget_to_avatar(clip, RetargetConfig(), 55)
    # the walking clip's root advances, but capsules stay near the origin
    late = track.poses[-1]
    assert late.root.position.norm() > 5.0
    for c in late.capsules:
        assert abs(c.a.x) < 2.0 and abs(c.a.y) < 2.0


def test_fk_frame_index_bounds(walk_clip_text):
    clip = parse_bvh(walk_clip_text)
    with pytest.raises(IndexError):
        forward_kinematics(clip, len(clip.frames), RetargetConfig())
