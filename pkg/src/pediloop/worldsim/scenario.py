"""Scripted crossing scenario: one autonomous vehicle approaches the map's
crosswalk while the live pedestrian decides when to cross.

The vehicle cruises at its target speed and, under the Yield policy, starts
a constant-deceleration brake at the last possible point
(v^2 / (2*decel) + stop_margin from the crosswalk edge, measured to the
front bumper). Under Ignore it holds speed straight through. Phase
bookkeeping follows the walker: crossing starts when the root enters the
crosswalk polygon and the run is done when it leaves on the far side or a
collision happens.
"""
from __future__ import annotations

import math
from ..errors import ScenarioSetupError
from ..geom import Quat, Transform, Vec3
from ..opendrive import (
    Crosswalk,
    MapModel,
    Road,
    lane_center_offset,
    point_in_polygon,
    project_to_road,
    sample_reference_line,
)
from .types import (
    BehaviorFlags,
    EventKind,
    ScenarioConfig,
    ScenarioEvent,
    ScenarioPhase,
    VehicleState,
    WalkerState,
    YieldPolicy,
)
from .vehicle import VehicleModel, apply_vehicle_control, brake_command_for_decel

VEHICLE_LANE = -1  # right-hand driving lane of the bundled map


class CrossingScenario:
    def __init__(self, cfg: ScenarioConfig, map_model: MapModel, vehicle_id: int = 1):
        self.cfg = cfg
        self.map = map_model
        self.crosswalk: Crosswalk = map_model.single_crosswalk()
        self.road: Road = map_model.roads[self.crosswalk.road_id]
        if cfg.vehicle_spawn_s < 0.0 or cfg.vehicle_spawn_s >= self.crosswalk.s_start:
            raise ScenarioSetupError(
                f"vehicle_spawn_s={cfg.vehicle_spawn_s} must lie before the crosswalk "
                f"(s={self.crosswalk.s_start})"
            )
        self.vehicle_id = vehicle_id
        self.phase = ScenarioPhase.WAITING
        self.braking_started = False
        self._entry_side: float = 0.0

    def spawn_vehicle(self) -> VehicleState:
        behavior = BehaviorFlags(ignore_pedestrians=self.cfg.yield_policy is YieldPolicy.IGNORE)
        if self.cfg.target_speed > behavior.speed_limit:
            raise ScenarioSetupError(
                f"target_speed {self.cfg.target_speed} exceeds speed limit {behavior.speed_limit}"
            )
        s = self.cfg.vehicle_spawn_s
        t = lane_center_offset(self.road, s, VEHICLE_LANE)
        (x, y), h = sample_reference_line(self.road, s)
        pos = Vec3(x - t * math.sin(h), y + t * math.cos(h), 0.0)
        return VehicleState(
            id=self.vehicle_id,
            transform=Transform(pos, Quat.from_yaw(h)),
            speed=self.cfg.target_speed,
            behavior=behavior,
        )

    @property
    def braking_intent(self) -> bool:
        """True while the vehicle is committed to giving way (eHMI cue)."""
        return self.braking_started

    def control_vehicle(self, v: VehicleState, dt: float, model: VehicleModel) -> tuple[VehicleState, list[ScenarioEvent]]:
        """Pick this tick's pedal commands for the scripted vehicle."""
        events: list[ScenarioEvent] = []
        if self.cfg.yield_policy is YieldPolicy.YIELD and not self.braking_started:
            front_s = project_to_road(self.road, v.transform.position.x, v.transform.position.y)
            front_s += v.dims.length / 2.0
            gap = self.crosswalk.s_start - front_s
            trigger = v.speed * v.speed / (2.0 * self.cfg.decel) + self.cfg.stop_margin
            if gap <= trigger:
                self.braking_started = True
                events.append(ScenarioEvent(EventKind.VEHICLE_YIELDING, v.id))

        if self.braking_started:
            v = apply_vehicle_control(v, 0.0, brake_command_for_decel(self.cfg.decel, model), 0.0, dt, model)
        else:
            # proportional cruise: exactly hold target_speed once reached
            desired_acc = (self.cfg.target_speed - v.speed) / dt if dt > 0.0 else 0.0
            throttle = (desired_acc + model.c_roll) / model.a_max
            v = apply_vehicle_control(v, throttle, 0.0, 0.0, dt, model)
        return v, events

    def update_phase(self, walker: WalkerState) -> list[ScenarioEvent]:
        events: list[ScenarioEvent] = []
        x, y = walker.root.position.x, walker.root.position.y
        inside = point_in_polygon(self.crosswalk.polygon, x, y)

        if self.phase is ScenarioPhase.VEHICLE_APPROACHING and inside:
            self._entry_side = self._lateral_sign(x, y)
            events.append(self._set_phase(ScenarioPhase.PEDESTRIAN_CROSSING))
        elif self.phase is ScenarioPhase.PEDESTRIAN_CROSSING and not inside:
            if self._lateral_sign(x, y) == -self._entry_side:
                events.append(self._set_phase(ScenarioPhase.DONE))
        return events

    def notify_started(self) -> ScenarioEvent:
        return self._set_phase(ScenarioPhase.VEHICLE_APPROACHING)

    def notify_collision(self) -> list[ScenarioEvent]:
        if self.phase is not ScenarioPhase.DONE:
            return [self._set_phase(ScenarioPhase.DONE)]
        return []

    def _set_phase(self, phase: ScenarioPhase) -> ScenarioEvent:
        self.phase = phase
        return ScenarioEvent(EventKind.PHASE_CHANGED, -1, phase.value)

    def _lateral_sign(self, x: float, y: float) -> float:
        s = project_to_road(self.road, x, y)
        (px, py), h = sample_reference_line(self.road, s)
        t = -(x - px) * math.sin(h) + (y - py) * math.cos(h)
        return math.copysign(1.0, t) if t != 0.0 else 0.0
