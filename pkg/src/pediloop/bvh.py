"""BVH motion-capture files: parse, write canonically, resample.

Parsing is whitespace-insensitive and validates structure as it goes;
every failure is a BvhParseError carrying the offending line number. The
writer produces one canonical form (tab indentation, 6-decimal floats) so
byte-stable output is guaranteed for a given clip.

Rotations stay as raw Euler channel values (degrees) in the clip; only
resampling converts through quaternions, per joint and per its declared
channel order, so interpolation is slerp rather than naive Euler lerp.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

from scipy.spatial.transform import Rotation as R

from .errors import BvhParseError
from .geom import Quat, quat_slerp

POSITION_CHANNELS = ("Xposition", "Yposition", "Zposition")
ROTATION_CHANNELS = ("Xrotation", "Yrotation", "Zrotation")
_VALID_CHANNELS = set(POSITION_CHANNELS) | set(ROTATION_CHANNELS)


@dataclass(frozen=True)
class BvhJoint:
    name: str
    parent: int  # -1 for the root
    offset: tuple[float, float, float]
    channels: tuple[str, ...]

    @property
    def rotation_order(self) -> str:
        """Intrinsic Euler sequence, e.g. 'ZXY', from the channel order."""
        return "".join(c[0] for c in self.channels if c.endswith("rotation"))

    @property
    def has_position(self) -> bool:
        return any(c.endswith("position") for c in self.channels)


@dataclass(frozen=True)
class BvhSkeleton:
    joints: tuple[BvhJoint, ...]
    end_sites: tuple[tuple[int, tuple[float, float, float]], ...] = ()

    @property
    def total_channels(self) -> int:
        return sum(len(j.channels) for j in self.joints)

    def channel_offset(self, joint_index: int) -> int:
        return sum(len(j.channels) for j in self.joints[:joint_index])

    def joint_index(self, name: str) -> int:
        for i, j in enumerate(self.joints):
            if j.name == name:
                return i
        raise KeyError(name)


@dataclass(frozen=True)
class BvhClip:
    skeleton: BvhSkeleton
    frame_time: float
    frames: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        if self.frame_time <= 0.0:
            raise ValueError("frame_time must be positive")
        width = self.skeleton.total_channels
        for i, row in enumerate(self.frames):
            if len(row) != width:
                raise ValueError(f"frame {i} has {len(row)} values, skeleton has {width} channels")

    @property
    def duration(self) -> float:
        return (len(self.frames) - 1) * self.frame_time if self.frames else 0.0


class _Lines:
    def __init__(self, text: str):
        self.rows = text.splitlines()
        self.i = 0

    def next(self) -> tuple[str, int]:
        while self.i < len(self.rows):
            line = self.rows[self.i].strip()
            self.i += 1
            if line:
                return line, self.i
        raise BvhParseError("unexpected end of file", len(self.rows))

    def peek(self) -> tuple[str, int] | None:
        j = self.i
        while j < len(self.rows):
            line = self.rows[j].strip()
            if line:
                return line, j + 1
            j += 1
        return None


def parse_bvh(text: str) -> BvhClip:
    lines = _Lines(text)

    line, n = lines.next()
    if line != "HIERARCHY":
        raise BvhParseError(f"expected HIERARCHY, found {line!r}", n)

    joints: list[BvhJoint] = []
    end_sites: list[tuple[int, tuple[float, float, float]]] = []
    stack: list[int] = []  # indices of open joints
    saw_root = False

    while True:
        line, n = lines.next()
        word = line.split()[0]

        if word in ("ROOT", "JOINT"):
            if word == "ROOT":
                if saw_root:
                    raise BvhParseError("multiple ROOT joints", n)
                saw_root = True
                parent = -1
            else:
                if not stack:
                    raise BvhParseError("JOINT outside of a joint block", n)
                parent = stack[-1]
            name = line[len(word):].strip()
            if not name:
                raise BvhParseError(f"{word} without a name", n)
            _expect_brace(lines)
            offset = _parse_offset(lines)
            channels = _parse_channels(lines)
            joints.append(BvhJoint(name, parent, offset, channels))
            stack.append(len(joints) - 1)

        elif line.startswith("End Site"):
            if not stack:
                raise BvhParseError("End Site outside of a joint block", n)
            _expect_brace(lines)
            offset = _parse_offset(lines)
            closing, cn = lines.next()
            if closing != "}":
                raise BvhParseError(f"expected }} closing End Site, found {closing!r}", cn)
            end_sites.append((stack[-1], offset))

        elif line == "}":
            if not stack:
                raise BvhParseError("unbalanced closing brace", n)
            stack.pop()
            if not stack:
                break

        else:
            raise BvhParseError(f"unexpected token {line!r} in hierarchy", n)

    if not saw_root:
        raise BvhParseError("no ROOT joint", 0)

    line, n = lines.next()
    if line != "MOTION":
        raise BvhParseError(f"expected MOTION, found {line!r}", n)
    line, n = lines.next()
    if not line.startswith("Frames:"):
        raise BvhParseError(f"expected 'Frames:', found {line!r}", n)
    try:
        declared = int(line.split(":", 1)[1])
    except ValueError:
        raise BvhParseError(f"bad frame count {line!r}", n)
    line, n = lines.next()
    if not line.startswith("Frame Time:"):
        raise BvhParseError(f"expected 'Frame Time:', found {line!r}", n)
    try:
        frame_time = float(line.split(":", 1)[1])
    except ValueError:
        raise BvhParseError(f"bad frame time {line!r}", n)
    if frame_time <= 0.0:
        raise BvhParseError(f"frame time must be positive, got {frame_time}", n)

    skeleton = BvhSkeleton(tuple(joints), tuple(end_sites))
    width = skeleton.total_channels
    frames: list[tuple[float, ...]] = []
    while True:
        nxt = lines.peek()
        if nxt is None:
            break
        line, n = lines.next()
        try:
            row = tuple(float(v) for v in line.split())
        except ValueError:
            raise BvhParseError(f"non-numeric motion value in {line!r}", n)
        if len(row) != width:
            raise BvhParseError(f"frame row has {len(row)} values, skeleton has {width} channels", n)
        frames.append(row)

    if len(frames) != declared:
        raise BvhParseError(f"MOTION declares {declared} frames but contains {len(frames)}", 0)

    return BvhClip(skeleton=skeleton, frame_time=frame_time, frames=tuple(frames))


def _expect_brace(lines: _Lines) -> None:
    line, n = lines.next()
    if line != "{":
        raise BvhParseError(f"expected {{, found {line!r}", n)


def _parse_offset(lines: _Lines) -> tuple[float, float, float]:
    line, n = lines.next()
    parts = line.split()
    if parts[0] != "OFFSET" or len(parts) != 4:
        raise BvhParseError(f"expected 'OFFSET x y z', found {line!r}", n)
    try:
        return (float(parts[1]), float(parts[2]), float(parts[3]))
    except ValueError:
        raise BvhParseError(f"non-numeric OFFSET in {line!r}", n)


def _parse_channels(lines: _Lines) -> tuple[str, ...]:
    line, n = lines.next()
    parts = line.split()
    if parts[0] != "CHANNELS":
        raise BvhParseError(f"expected CHANNELS, found {line!r}", n)
    try:
        count = int(parts[1])
    except (IndexError, ValueError):
        raise BvhParseError(f"bad CHANNELS count in {line!r}", n)
    names = tuple(parts[2:])
    if len(names) != count:
        raise BvhParseError(f"CHANNELS declares {count} but lists {len(names)}", n)
    if count not in (3, 6):
        raise BvhParseError(f"unsupported channel count {count} (need 3 or 6)", n)
    for name in names:
        if name not in _VALID_CHANNELS:
            raise BvhParseError(f"unknown channel {name!r}", n)
    return names


def write_bvh(clip: BvhClip) -> str:
    """Canonical text form: tabs, 6-decimal floats, stable across runs."""
    sk = clip.skeleton
    children: dict[int, list[int]] = {i: [] for i in range(-1, len(sk.joints))}
    for i, j in enumerate(sk.joints):
        children[j.parent].append(i)
    sites: dict[int, list[tuple[float, float, float]]] = {}
    for parent, offset in sk.end_sites:
        sites.setdefault(parent, []).append(offset)

    out: list[str] = ["HIERARCHY"]

    def fmt(v: float) -> str:
        return f"{v + 0.0:.6f}"  # +0.0 folds -0.0 into 0.0

    def emit(idx: int, depth: int) -> None:
        j = sk.joints[idx]
        tag = "ROOT" if j.parent == -1 else "JOINT"
        pad = "\t" * depth
        out.append(f"{pad}{tag} {j.name}")
        out.append(f"{pad}{{")
        inner = "\t" * (depth + 1)
        out.append(f"{inner}OFFSET {fmt(j.offset[0])} {fmt(j.offset[1])} {fmt(j.offset[2])}")
        out.append(f"{inner}CHANNELS {len(j.channels)} {' '.join(j.channels)}")
        for child in children[idx]:
            emit(child, depth + 1)
        for offset in sites.get(idx, []):
            out.append(f"{inner}End Site")
            out.append(f"{inner}{{")
            out.append(f"{inner}\tOFFSET {fmt(offset[0])} {fmt(offset[1])} {fmt(offset[2])}")
            out.append(f"{inner}}}")
        out.append(f"{pad}}}")

    for root in children[-1]:
        emit(root, 0)

    out.append("MOTION")
    out.append(f"Frames: {len(clip.frames)}")
    out.append(f"Frame Time: {fmt(clip.frame_time)}")
    for row in clip.frames:
        out.append(" ".join(fmt(v) for v in row))
    return "\n".join(out) + "\n"


def euler_to_quat(order: str, degrees: tuple[float, ...]) -> Quat:
    """Channel-order Euler angles (degrees) to a unit quaternion."""
    x, y, z, w = R.from_euler(order, list(degrees), degrees=True).as_quat()
    return Quat(w, x, y, z).normalized()


def quat_to_euler(order: str, q: Quat) -> tuple[float, ...]:
    angles = R.from_quat([q.x, q.y, q.z, q.w]).as_euler(order, degrees=True)
    return tuple(float(a) for a in angles)


def resample_clip(clip: BvhClip, dt_out: float) -> BvhClip:
    """Resample onto the tick grid t = k*dt_out, k = 0..floor(duration/dt_out).

    Positions interpolate linearly; rotations go Euler -> quaternion ->
    slerp -> Euler using each joint's declared order. Frames landing exactly
    on a source frame are copied verbatim.
    """
    if dt_out <= 0.0:
        raise ValueError("dt_out must be positive")
    if not clip.frames:
        raise ValueError("cannot resample an empty clip")

    n = len(clip.frames)
    ratio = dt_out / clip.frame_time
    count = int(math.floor((n - 1) / ratio + 1e-9)) + 1 if n > 1 else 1

    sk = clip.skeleton
    spans: list[tuple[int, BvhJoint]] = [(sk.channel_offset(i), j) for i, j in enumerate(sk.joints)]

    frames: list[tuple[float, ...]] = []
    for k in range(count):
        u = min(k * ratio, float(n - 1))
        i0 = min(int(math.floor(u)), n - 1)
        frac = u - i0
        if frac <= 1e-12 or i0 >= n - 1:
            frames.append(clip.frames[i0])
            continue
        row0, row1 = clip.frames[i0], clip.frames[i0 + 1]
        row: list[float] = []
        for base, joint in spans:
            rot0: list[float] = []
            rot1: list[float] = []
            rot_positions: list[int] = []
            for ci, channel in enumerate(joint.channels):
                v0, v1 = row0[base + ci], row1[base + ci]
                if channel.endswith("position"):
                    row.append(v0 + (v1 - v0) * frac)
                else:
                    rot0.append(v0)
                    rot1.append(v1)
                    rot_positions.append(len(row))
                    row.append(0.0)  # placeholder
            if rot_positions:
                order = joint.rotation_order
                q = quat_slerp(euler_to_quat(order, tuple(rot0)), euler_to_quat(order, tuple(rot1)), frac)
                for pos, angle in zip(rot_positions, quat_to_euler(order, q)):
                    row[pos] = angle
        frames.append(tuple(row))

    return replace(clip, frame_time=dt_out, frames=tuple(frames))
