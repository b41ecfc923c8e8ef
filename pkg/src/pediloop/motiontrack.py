"""Tick-indexed avatar motion: the bridge between mocap clips and recordings.

A MotionTrack is what clip retargeting produces and what the recording merge
consumes. Each pose carries the clip's own root path (for inspection), the
local joint transforms in avatar order, and collision capsules expressed in
the root frame so they can be re-posed at the live-recorded root.
"""
from __future__ import annotations

from dataclasses import dataclass

from .geom import Transform
from .worldsim.types import Capsule


@dataclass(frozen=True)
class TrackPose:
    root: Transform  # clip root mapped into world units/axes
    joints: tuple[Transform, ...]  # local, avatar skeleton order
    capsules: tuple[Capsule, ...]  # root-relative


@dataclass(frozen=True)
class MotionTrack:
    dt_ms: int
    poses: tuple[TrackPose, ...]

    def __len__(self) -> int:
        return len(self.poses)
