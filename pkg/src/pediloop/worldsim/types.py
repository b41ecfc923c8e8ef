"""World-state value types: actors, inputs, events and the per-tick snapshot.

Everything here is an immutable value. The snapshot is the atomic unit that
gets recorded, replayed and broadcast, so its field set is the de-facto wire
schema (see serialize.py for the canonical byte layout).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

from ..geom import OrientedRect2, Quat, Rect2, Transform, Vec3

DEFAULT_DT_MS = 55  # 1/0.055 s = 18.18 ticks per second


class EhmiColor(enum.Enum):
    OFF = "off"
    CYAN = "cyan"


@dataclass(frozen=True)
class EhmiState:
    activated: bool = False
    color: EhmiColor = EhmiColor.OFF

    def __post_init__(self) -> None:
        expected = EhmiColor.CYAN if self.activated else EhmiColor.OFF
        if self.color is not expected:
            raise ValueError(f"eHMI color {self.color} inconsistent with activated={self.activated}")


@dataclass(frozen=True)
class BehaviorFlags:
    speed_limit: float = 13.89  # 50 km/h
    ignore_pedestrians: bool = False
    ignore_traffic_lights: bool = True

    def __post_init__(self) -> None:
        if self.speed_limit <= 0.0:
            raise ValueError("speed_limit must be positive")


@dataclass(frozen=True)
class VehicleDims:
    """Rigid body box of a vehicle, centered on its transform position."""

    length: float = 4.5
    width: float = 1.9
    height: float = 1.5


@dataclass(frozen=True)
class VehicleState:
    id: int
    transform: Transform
    speed: float = 0.0  # m/s, forward; no reverse gear in this artifact
    throttle: float = 0.0
    brake: float = 0.0
    steer: float = 0.0
    ehmi: EhmiState = EhmiState()
    behavior: BehaviorFlags = BehaviorFlags()
    dims: VehicleDims = VehicleDims()

    def __post_init__(self) -> None:
        if not (0.0 <= self.throttle <= 1.0 and 0.0 <= self.brake <= 1.0):
            raise ValueError("throttle and brake must be in [0, 1]")
        if not -1.0 <= self.steer <= 1.0:
            raise ValueError("steer must be in [-1, 1]")
        if self.speed < 0.0:
            raise ValueError("speed must be non-negative")


@dataclass(frozen=True)
class Capsule:
    a: Vec3
    b: Vec3
    radius: float

    def __post_init__(self) -> None:
        if self.radius <= 0.0:
            raise ValueError("capsule radius must be positive")


@dataclass(frozen=True)
class WalkerState:
    id: int
    root: Transform
    joints: tuple[Transform, ...]  # local transforms, avatar skeleton order
    capsules: tuple[Capsule, ...]  # world space, one per bone


@dataclass(frozen=True)
class PoseInput:
    """Head/hand tracking sample in tracking space, optionally with a full
    body pose from a live mocap feed."""

    head: Transform
    timestamp: float
    hands: tuple[Transform | None, Transform | None] = (None, None)
    body_joints: tuple[Quat, ...] | None = None
    avatar_id: int | None = None


@dataclass(frozen=True)
class WalkIntent:
    """Keyboard-fallback locomotion command, velocities in the walker frame."""

    forward: float = 0.0  # m/s
    strafe: float = 0.0  # m/s, positive left
    turn: float = 0.0  # rad/s, counter-clockwise
    avatar_id: int | None = None


@dataclass(frozen=True)
class PlayArea:
    """Affine map between the physical tracking rectangle and the patch of
    map the pedestrian may occupy."""

    tracking_rect: Rect2
    world_rect: OrientedRect2

    def tracking_to_world(self, tx: float, ty: float) -> tuple[float, float]:
        u = (tx - self.tracking_rect.min_x) / self.tracking_rect.width * self.world_rect.width
        v = (ty - self.tracking_rect.min_y) / self.tracking_rect.height * self.world_rect.height
        return self.world_rect.to_world(u, v)

    def world_to_tracking(self, x: float, y: float) -> tuple[float, float]:
        u, v = self.world_rect.to_local(x, y)
        tx = u / self.world_rect.width * self.tracking_rect.width + self.tracking_rect.min_x
        ty = v / self.world_rect.height * self.tracking_rect.height + self.tracking_rect.min_y
        return (tx, ty)


class ScenarioPhase(enum.Enum):
    WAITING = "waiting"
    VEHICLE_APPROACHING = "vehicle_approaching"
    PEDESTRIAN_CROSSING = "pedestrian_crossing"
    DONE = "done"


class YieldPolicy(enum.Enum):
    IGNORE = "ignore"
    YIELD = "yield"


class EventKind(enum.Enum):
    VEHICLE_YIELDING = "vehicle_yielding"
    EHMI_CHANGED = "ehmi_changed"
    PHASE_CHANGED = "phase_changed"
    OUT_OF_PLAY_AREA = "out_of_play_area"
    COLLISION = "collision"


@dataclass(frozen=True)
class ScenarioEvent:
    kind: EventKind
    actor_id: int = -1
    detail: str = ""


@dataclass(frozen=True)
class AudioLevel:
    level: float  # [0, 1]
    pan: float  # [-1, 1], positive right


@dataclass(frozen=True)
class ScenarioConfig:
    vehicle_spawn_s: float = 5.0
    target_speed: float = 8.33  # 30 km/h
    yield_policy: YieldPolicy = YieldPolicy.YIELD
    decel: float = 6.0
    ehmi_enabled: bool = True
    stop_margin: float = 0.5

    def __post_init__(self) -> None:
        if self.decel <= 0.0:
            raise ValueError("decel must be positive")
        if self.target_speed <= 0.0:
            raise ValueError("target_speed must be positive")
        if self.stop_margin < 0.0:
            raise ValueError("stop_margin must be non-negative")

    def with_overrides(self, **kwargs) -> "ScenarioConfig":
        return replace(self, **kwargs)


@dataclass(frozen=True)
class WorldSnapshot:
    tick: int
    sim_time: float  # always tick * dt, dt from config
    vehicles: tuple[VehicleState, ...]
    walker: WalkerState
    scenario_phase: ScenarioPhase
    audio_levels: tuple[tuple[int, AudioLevel], ...]  # (actor id, level) pairs
    ambient_level: float
    events: tuple[ScenarioEvent, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if self.tick < 0:
            raise ValueError("tick must be non-negative")


def require_finite(name: str, value: float) -> float:
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value}")
    return value
