import pytest

from pediloop.bvh import BvhClip, BvhJoint, BvhSkeleton, parse_bvh, resample_clip, write_bvh
from pediloop.errors import BvhParseError

MINIMAL = """HIERARCHY
ROOT Hips
{
    OFFSET 0.0 0.0 0.0
    CHANNELS 6 Xposition Yposition Zposition Zrotation Xrotation Yrotation
    End Site
    {
        OFFSET 0.0 10.0 0.0
    }
}
MOTION
Frames: 2
Frame Time: 0.01
0 0 0 0 0 0
0 0 0 0 0 0
"""


def single_joint_clip(frames, frame_time=0.1, channels=None):
    channels = channels or ("Xposition", "Yposition", "Zposition", "Zrotation", "Xrotation", "Yrotation")
    sk = BvhSkeleton((BvhJoint("Hips", -1, (0.0, 0.0, 0.0), channels),))
    return BvhClip(skeleton=sk, frame_time=frame_time, frames=tuple(tuple(f) for f in frames))


def test_minimal_clip_parses():
    clip = parse_bvh(MINIMAL)
    assert len(clip.skeleton.joints) == 1
    assert len(clip.frames) == 2
    assert clip.frame_time == 0.01
    assert clip.skeleton.joints[0].rotation_order == "ZXY"
    assert clip.skeleton.end_sites == ((0, (0.0, 10.0, 0.0)),)


def test_bundled_walking_clip_structure(walk_clip_text):
    clip = parse_bvh(walk_clip_text)
    assert len(clip.skeleton.joints) == 17
    assert len(clip.frames) == 1501
    assert clip.frame_time == pytest.approx(0.01)


def test_round_trip_within_tolerance(walk_clip_text):
    clip = parse_bvh(walk_clip_text)
    reparsed = parse_bvh(write_bvh(clip))
    assert len(reparsed.frames) == len(clip.frames)
    for row_a, row_b in zip(clip.frames, reparsed.frames):
        for a, b in zip(row_a, row_b):
            assert abs(a - b) <= 1e-4


def test_round_trip_is_byte_stable(walk_clip_text):
    clip = parse_bvh(walk_clip_text)
    once = write_bvh(clip)
    twice = write_bvh(parse_bvh(once))
    assert once == twice


def test_high_precision_channels_round_trip():
    clip = single_joint_clip([(0.1234567, -2.7182818, 3.1415926, 10.123456, -20.654321, 175.999999)])
    reparsed = parse_bvh(write_bvh(clip))
    for a, b in zip(clip.frames[0], reparsed.frames[0]):
        assert abs(a - b) <= 1e-4


def test_empty_motion_clip():
    clip = single_joint_clip([])
    text = write_bvh(clip)
    assert "Frames: 0" in text
    reparsed = parse_bvh(text)
    assert reparsed.frames == ()


def test_missing_motion_section():
    broken = MINIMAL.split("MOTION")[0]
    with pytest.raises(BvhParseError):
        parse_bvh(broken)


def test_frame_count_mismatch():
    broken = MINIMAL.replace("Frames: 2", "Frames: 3")
    with pytest.raises(BvhParseError) as err:
        parse_bvh(broken)
    assert "3" in str(err.value)


def test_frame_row_length_mismatch_names_line():
    broken = MINIMAL.replace("0 0 0 0 0 0\n0 0 0 0 0 0", "0 0 0 0 0 0\n0 0 0 0 0")
    with pytest.raises(BvhParseError) as err:
        parse_bvh(broken)
    assert err.value.line is not None


def test_channel_count_mismatch():
    broken = MINIMAL.replace("CHANNELS 6", "CHANNELS 5")
    with pytest.raises(BvhParseError):
        parse_bvh(broken)


def test_unsupported_channel_count():
    broken = MINIMAL.replace(
        "CHANNELS 6 Xposition Yposition Zposition Zrotation Xrotation Yrotation",
        "CHANNELS 2 Xposition Yposition",
    )
    with pytest.raises(BvhParseError) as err:
        parse_bvh(broken)
    assert "channel count" in str(err.value)


def test_multiple_roots_rejected():
    broken = MINIMAL.replace("MOTION", "ROOT Other\n{\nOFFSET 0 0 0\nCHANNELS 3 Zrotation Xrotation Yrotation\n}\nMOTION")
    with pytest.raises(BvhParseError):
        parse_bvh(broken)


def test_whitespace_insensitive():
    spaced = MINIMAL.replace("    ", "\t\t  ").replace("Frames: 2", "Frames:   2")
    clip = parse_bvh(spaced)
    assert len(clip.frames) == 2


def test_resample_identity():
    rows = [(float(i), 0.0, 0.0, 10.0 * i, 0.0, 0.0) for i in range(5)]
    clip = single_joint_clip(rows, frame_time=0.055)
    out = resample_clip(clip, 0.055)
    assert out.frames == clip.frames


def test_resample_linear_position_closed_form():
    # root X moves 0 -> 1 linearly over 1 s at 100 Hz
    rows = [(i / 100.0, 0.0, 0.0, 0.0, 0.0, 0.0) for i in range(101)]
    clip = single_joint_clip(rows, frame_time=0.01)
    out = resample_clip(clip, 0.055)
    assert len(out.frames) == 19  # k = 0..18, t covers 0.99 of 1.0 s
    for k, row in enumerate(out.frames):
        assert abs(row[0] - 0.055 * k) <= 1e-6


def test_resample_slerp_midpoint_is_bisector():
    rows = [(0.0,) * 3 + (0.0, 0.0, 0.0), (0.0,) * 3 + (90.0, 0.0, 0.0)]
    clip = single_joint_clip(rows, frame_time=0.1)
    out = resample_clip(clip, 0.05)
    assert len(out.frames) == 3
    z_mid = out.frames[1][3]
    assert abs(z_mid - 45.0) <= 1e-6


def test_resample_preserves_first_frame_exactly():
    rows = [(1.25, -3.5, 0.125, 33.3, -12.0, 170.0), (2.0, 0.0, 0.0, 90.0, 45.0, -90.0)]
    clip = single_joint_clip(rows, frame_time=0.08)
    out = resample_clip(clip, 0.055)
    assert out.frames[0] == clip.frames[0]


def test_resample_covers_duration_within_one_step():
    rows = [(float(i), 0.0, 0.0, 0.0, 0.0, 0.0) for i in range(101)]
    clip = single_joint_clip(rows, frame_time=0.01)
    for dt_out in (0.031, 0.055, 0.2, 1.0):
        out = resample_clip(clip, dt_out)
        covered = (len(out.frames) - 1) * dt_out
        assert clip.duration - covered < dt_out + 1e-12


def test_resample_single_frame_clip():
    clip = single_joint_clip([(1.0, 2.0, 3.0, 4.0, 5.0, 6.0)])
    out = resample_clip(clip, 0.055)
    assert out.frames == clip.frames


def test_resample_respects_rotation_order():
    # ZXY vs XYZ give different interpolation paths for large mixed rotations;
    # here just verify the declared order round-trips through the resampler
    channels = ("Xposition", "Yposition", "Zposition", "Xrotation", "Yrotation", "Zrotation")
    rows = [(0.0, 0.0, 0.0, 0.0, 0.0, 0.0), (0.0, 0.0, 0.0, 0.0, 90.0, 0.0)]
    clip = single_joint_clip(rows, frame_time=0.1, channels=channels)
    out = resample_clip(clip, 0.05)
    assert out.skeleton.joints[0].rotation_order == "XYZ"
    assert abs(out.frames[1][4] - 45.0) <= 1e-6
