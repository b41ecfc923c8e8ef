"""Authoritative fixed-timestep world.

One World instance is owned by a single tick thread. Each step consumes at
most one coalesced walker input and advances the simulation in a fixed
order: scenario logic, vehicle control, vehicle integration, walker update,
eHMI update, collision check, audio levels, snapshot emission. Given the
same config and input trace the emitted snapshot stream is byte-identical
across runs.
"""
from __future__ import annotations

from dataclasses import replace

from ..errors import ConfigError
from ..opendrive import MapModel
from . import audio as audio_mod
from . import collision as collision_mod
from .config import WorldConfig
from .ehmi import update_ehmi
from .scenario import CrossingScenario
from .types import (
    PoseInput,
    ScenarioEvent,
    ScenarioPhase,
    VehicleState,
    WalkerState,
    WalkIntent,
    WorldSnapshot,
)
from .vehicle import integrate_vehicle
from .walker import make_walker, update_walker_from_input, update_walker_from_walk

WALKER_ID = 100
LISTENER_HEIGHT = 1.73  # bind-pose head height; ears follow the root

WalkerInput = PoseInput | WalkIntent


class World:
    def __init__(self, config: WorldConfig, map_model: MapModel):
        self.config = config
        self.map = map_model
        self.reset()

    def reset(self) -> None:
        self.tick = 0
        self.scenario = CrossingScenario(self.config.scenario, self.map)
        sx, sy = self.config.walker_spawn
        self.walker: WalkerState = make_walker(WALKER_ID, sx, sy, self.config.walker_heading)
        self.vehicles: list[VehicleState] = []
        self._last_applied_head = None
        self._collided: set[int] = set()
        self._pending_events: list[ScenarioEvent] = []
        self._started = False

    @property
    def dt(self) -> float:
        return self.config.dt

    @property
    def phase(self) -> ScenarioPhase:
        return self.scenario.phase

    def start_scenario(self) -> None:
        """Spawn the scripted vehicle and begin the approach."""
        if self._started:
            return
        self._started = True
        self.vehicles = [self.scenario.spawn_vehicle()]
        self._pending_events.append(self.scenario.notify_started())

    def step(self, inp: WalkerInput | None = None) -> WorldSnapshot:
        events: list[ScenarioEvent] = list(self._pending_events)
        self._pending_events.clear()
        dt = self.dt

        # scenario logic + vehicle control
        if self._started:
            events.extend(self.scenario.update_phase(self.walker))
            controlled: list[VehicleState] = []
            for v in self.vehicles:
                v, ev = self.scenario.control_vehicle(v, dt, self.config.model)
                events.extend(ev)
                controlled.append(v)
            self.vehicles = [integrate_vehicle(v, dt, self.config.model) for v in controlled]

        # walker update
        if isinstance(inp, PoseInput):
            self.walker, self._last_applied_head, ev = update_walker_from_input(
                self.walker, inp, self.config.play_area, self._last_applied_head
            )
            events.extend(ev)
        elif isinstance(inp, WalkIntent):
            self.walker, ev = update_walker_from_walk(self.walker, inp, self.config.play_area, dt)
            events.extend(ev)
        elif inp is not None:
            raise ConfigError(f"unsupported input type {type(inp).__name__}")

        # eHMI
        updated: list[VehicleState] = []
        for v in self.vehicles:
            state, ev = update_ehmi(v, self.scenario.braking_intent, self.config.scenario.ehmi_enabled)
            events.extend(ev)
            updated.append(v if state == v.ehmi else replace(v, ehmi=state))
        self.vehicles = updated

        # collision
        collision_events = collision_mod.check_collision(self.walker, tuple(self.vehicles), self._collided)
        if collision_events:
            events.extend(collision_events)
            events.extend(self.scenario.notify_collision())

        # audio
        listener = _lift(self.walker)
        levels, ambient = audio_mod.compute_audio_levels(listener, tuple(self.vehicles))

        snapshot = WorldSnapshot(
            tick=self.tick,
            sim_time=self.tick * (self.config.dt_ms / 1000.0),
            vehicles=tuple(self.vehicles),
            walker=self.walker,
            scenario_phase=self.scenario.phase,
            audio_levels=levels,
            ambient_level=ambient,
            events=tuple(events),
        )
        self.tick += 1
        return snapshot


def _lift(walker: WalkerState):
    from ..geom import Transform, Vec3

    p = walker.root.position
    return Transform(Vec3(p.x, p.y, p.z + LISTENER_HEIGHT), walker.root.orientation)


def step_world(world: World, inputs: WalkerInput | None, dt: float) -> WorldSnapshot:
    """Advance one tick, validating the caller agrees on the configured step."""
    if dt != world.dt:
        raise ConfigError(f"dt={dt} does not match configured step {world.dt}")
    return world.step(inputs)
