"""Regenerate the bundled data fixtures (deterministic).

Writes src/pediloop/data/walk_17joint.bvh (synthetic 15 s walking clip,
100 Hz, Y-up centimeters, same topology as the avatar skeleton) and
src/pediloop/data/presence_synthetic_18.csv (18 participants x 15 Likert
answers from a seeded RNG).
"""
from __future__ import annotations

import math
import random
from pathlib import Path

from pediloop import avatar
from pediloop.bvh import BvhClip, BvhJoint, BvhSkeleton, write_bvh

DATA_DIR = Path(__file__).resolve().parents[1] / "src" / "pediloop" / "data"

FPS = 100
DURATION_S = 15.0
WALK_SPEED_CM_S = 120.0
GAIT_HZ = 0.9


def world_offset_to_clip_cm(offset) -> tuple[float, float, float]:
    # world (x fwd, y left, z up) meters -> clip (x fwd, y up, z right) cm
    return (offset.x * 100.0, offset.z * 100.0, -offset.y * 100.0)


def build_skeleton() -> BvhSkeleton:
    joints = []
    for j in avatar.AVATAR_JOINTS:
        if j.parent < 0:
            # root translation lives in the position channels, as exporters do
            channels = ("Xposition", "Yposition", "Zposition", "Zrotation", "Xrotation", "Yrotation")
            offset = (0.0, 0.0, 0.0)
        else:
            channels = ("Zrotation", "Xrotation", "Yrotation")
            offset = world_offset_to_clip_cm(j.offset)
        joints.append(BvhJoint(j.name, j.parent, offset, channels))
    # end sites on the extremities so the hierarchy reads like a mocap export
    tips = {
        "Head": (0.0, 15.0, 0.0),
        "LeftHand": (0.0, 0.0, -10.0),
        "RightHand": (0.0, 0.0, 10.0),
        "LeftFoot": (12.0, 0.0, 0.0),
        "RightFoot": (12.0, 0.0, 0.0),
    }
    index = {j.name: i for i, j in enumerate(avatar.AVATAR_JOINTS)}
    end_sites = tuple((index[name], off) for name, off in tips.items())
    return BvhSkeleton(tuple(joints), end_sites)


def gait_angles(t: float) -> dict[str, tuple[float, float, float]]:
    """Per-joint (Z, X, Y) rotation degrees at time t."""
    p = 2.0 * math.pi * GAIT_HZ * t
    swing = math.sin(p)
    knee_l = max(0.0, math.sin(p + math.pi / 3.0))
    knee_r = max(0.0, math.sin(p + math.pi + math.pi / 3.0))
    return {
        "Hips": (0.0, 0.0, 2.0 * swing),
        "Spine": (1.5 * swing, 0.0, -1.0 * swing),
        "Chest": (1.0 * swing, 0.0, -2.0 * swing),
        "Neck": (0.0, 0.0, 1.0 * swing),
        "Head": (0.0, 2.0 * math.sin(p * 2.0), 0.0),
        "LeftArm": (-18.0 * swing, 0.0, 0.0),
        "LeftForeArm": (-8.0 - 6.0 * swing, 0.0, 0.0),
        "LeftHand": (0.0, 0.0, 0.0),
        "RightArm": (18.0 * swing, 0.0, 0.0),
        "RightForeArm": (-8.0 + 6.0 * swing, 0.0, 0.0),
        "RightHand": (0.0, 0.0, 0.0),
        "LeftUpLeg": (25.0 * swing, 0.0, 0.0),
        "LeftLeg": (-35.0 * knee_l, 0.0, 0.0),
        "LeftFoot": (8.0 * swing, 0.0, 0.0),
        "RightUpLeg": (-25.0 * swing, 0.0, 0.0),
        "RightLeg": (-35.0 * knee_r, 0.0, 0.0),
        "RightFoot": (-8.0 * swing, 0.0, 0.0),
    }


def build_clip() -> BvhClip:
    skeleton = build_skeleton()
    frames = []
    count = int(DURATION_S * FPS) + 1
    for k in range(count):
        t = k / FPS
        angles = gait_angles(t)
        row: list[float] = []
        bob = 2.0 * abs(math.sin(2.0 * math.pi * GAIT_HZ * t))
        for j in avatar.AVATAR_JOINTS:
            z, x, y = angles[j.name]
            if j.parent < 0:
                row.extend([WALK_SPEED_CM_S * t, 95.0 + bob, 0.0, z, x, y])
            else:
                row.extend([z, x, y])
        frames.append(tuple(row))
    return BvhClip(skeleton=skeleton, frame_time=1.0 / FPS, frames=tuple(frames))


def build_presence_csv() -> str:
    rng = random.Random(20230817)
    header = "participant," + ",".join(f"i{n:02d}" for n in range(1, 16))
    rows = [header]
    for p in range(1, 19):
        disposition = rng.uniform(-0.8, 0.8)  # participant-level bias drives consistency
        answers = []
        for item in range(15):
            base = 3.6 + disposition + rng.gauss(0.0, 0.7)
            answers.append(min(5, max(1, round(base))))
        rows.append(f"p{p:02d}," + ",".join(str(a) for a in answers))
    return "\n".join(rows) + "\n"


def main() -> None:
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    clip = build_clip()
    (DATA_DIR / "walk_17joint.bvh").write_text(write_bvh(clip), encoding="utf-8")
    (DATA_DIR / "presence_synthetic_18.csv").write_text(build_presence_csv(), encoding="utf-8")
    print(f"wrote {DATA_DIR / 'walk_17joint.bvh'} ({len(clip.frames)} frames)")
    print(f"wrote {DATA_DIR / 'presence_synthetic_18.csv'}")


if __name__ == "__main__":
    main()
