"""Per-actor audio levels for the pedestrian's speakers.

The simulator core only computes gain and stereo pan numbers; actually
making noise is the UI client's job. Engine gain follows throttle (an idle
floor so a coasting car is still audible), distance attenuation is
inverse-square-like with a 10 m half-loudness knee, and pan is the sine of
the source bearing relative to the listener's facing.
"""
from __future__ import annotations

import math

from ..geom import Transform
from .types import AudioLevel, VehicleState

IDLE_GAIN = 0.2
THROTTLE_GAIN = 0.8
HALF_DISTANCE = 10.0  # m: level halves at this range for a full-throttle source
AMBIENT_LEVEL = 0.1


def engine_gain(throttle: float) -> float:
    return IDLE_GAIN + THROTTLE_GAIN * throttle


def compute_audio_levels(
    listener: Transform, vehicles: tuple[VehicleState, ...]
) -> tuple[tuple[tuple[int, AudioLevel], ...], float]:
    """Levels and pans for every vehicle, plus the constant ambient bed."""
    yaw = listener.orientation.yaw()
    fwd_x, fwd_y = math.cos(yaw), math.sin(yaw)
    right_x, right_y = math.sin(yaw), -math.cos(yaw)

    out: list[tuple[int, AudioLevel]] = []
    for v in vehicles:
        dx = v.transform.position.x - listener.position.x
        dy = v.transform.position.y - listener.position.y
        d = math.hypot(dx, dy)
        gain = engine_gain(v.throttle)
        level = gain / (1.0 + (d / HALF_DISTANCE) ** 2)
        level = min(max(level, 0.0), 1.0)
        if d > 0.0:
            pan = (dx * right_x + dy * right_y) / d
            pan = min(max(pan, -1.0), 1.0)
        else:
            pan = 0.0
        out.append((v.id, AudioLevel(level, pan)))
    return tuple(out), AMBIENT_LEVEL
