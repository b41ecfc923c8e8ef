"""Headless scripted pedestrian for CI and fixtures.

Mimics the instructed participant: wait at the curb, cross when it looks
safe (the approaching vehicle has effectively stopped or has already passed
the crossing), keep walking until past the far edge, then stand still. The
policy reads only broadcast snapshots, so a run driven by it is a pure
function of the scenario.
"""
from __future__ import annotations

from .opendrive import MapModel, project_to_road
from .worldsim.types import ScenarioPhase, WalkIntent, WorldSnapshot

PREFERRED_WALK_SPEED = 1.4  # m/s
STOPPED_SPEED = 0.05  # below this an approaching vehicle counts as stopped
PASS_MARGIN = 2.0  # m beyond the crosswalk before a vehicle counts as past


class ScriptedPedestrian:
    def __init__(self, map_model: MapModel, walk_speed: float = PREFERRED_WALK_SPEED):
        self.crosswalk = map_model.single_crosswalk()
        self.road = map_model.roads[self.crosswalk.road_id]
        self.walk_speed = walk_speed
        self.crossing = False

    def _vehicle_clear(self, snapshot: WorldSnapshot) -> bool:
        for v in snapshot.vehicles:
            s = project_to_road(self.road, v.transform.position.x, v.transform.position.y)
            rear = s - v.dims.length / 2.0
            passed = rear > self.crosswalk.s_end + PASS_MARGIN
            stopped = v.speed < STOPPED_SPEED
            if not (passed or stopped):
                return False
        return True

    def next_intent(self, snapshot: WorldSnapshot | None) -> WalkIntent:
        if snapshot is None:
            return WalkIntent()
        if snapshot.scenario_phase is ScenarioPhase.DONE:
            self.crossing = False
            return WalkIntent()
        if not self.crossing:
            if snapshot.scenario_phase is ScenarioPhase.VEHICLE_APPROACHING and self._vehicle_clear(snapshot):
                self.crossing = True
        if self.crossing:
            return WalkIntent(forward=self.walk_speed)
        return WalkIntent()
