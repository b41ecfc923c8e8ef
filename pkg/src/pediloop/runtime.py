"""Run loops binding world, recording, gateway and timing together.

run_live is the synchronous in-process loop (used headless and by tests);
serve_live wraps the same tick logic in an asyncio server so network
pedestrians and spectators can join. Live mode never touches the sensors
module: the loop simply has no code path into it, and the timing recorder
carries the sensor-op counter that tests assert stays at zero.
"""
from __future__ import annotations

import asyncio
import time
from dataclasses import dataclass
from pathlib import Path

from .driver import ScriptedPedestrian
from .gateway import protocol as proto
from .gateway.server import GatewayServer
from .gateway.session import Gateway
from .opendrive import MapModel, map_geometry_jsonable
from .recording import Mode, Recording, TimingRecorder, TimingStats, measure_timing, record_tick
from .worldsim import World, WorldConfig
from .worldsim.config import apply_scenario_overrides
from .worldsim.world import WALKER_ID

DONE_TAIL_TICKS = 10
DEFAULT_MAX_TICKS = 4000


@dataclass
class LiveResult:
    recording: Recording
    timing: TimingStats
    world: World


def _new_recording(config: WorldConfig, map_model: MapModel) -> Recording:
    return Recording(map_digest=map_model.digest, dt_ms=config.dt_ms, scenario=config.scenario)


def run_live(
    config: WorldConfig,
    map_model: MapModel,
    driver: ScriptedPedestrian | None = None,
    realtime: bool = False,
    max_ticks: int = DEFAULT_MAX_TICKS,
    done_tail: int = DONE_TAIL_TICKS,
) -> LiveResult:
    """Run the scenario to completion without any network I/O."""
    world = World(config, map_model)
    world.start_scenario()
    rec = _new_recording(config, map_model)
    recorder = TimingRecorder(Mode.LIVE, config.dt)

    snapshot = None
    ticks_after_done = 0
    for _ in range(max_ticks):
        t0 = time.perf_counter()
        intent = driver.next_intent(snapshot) if driver is not None else None
        snapshot = world.step(intent)
        record_tick(rec, snapshot)
        recorder.note_tick(time.perf_counter() - t0)
        if realtime:
            leftover = config.dt - (time.perf_counter() - t0)
            if leftover > 0.0:
                time.sleep(leftover)
        if snapshot.scenario_phase.value == "done":
            ticks_after_done += 1
            if ticks_after_done > done_tail:
                break
    return LiveResult(recording=rec, timing=measure_timing(recorder), world=world)


async def serve_live(
    config: WorldConfig,
    map_model: MapModel,
    host: str = "127.0.0.1",
    tcp_port: int = 7077,
    http_port: int = 7078,
    static_dir: Path | None = None,
    driver: ScriptedPedestrian | None = None,
    realtime: bool = True,
    autostart: bool = True,
    max_ticks: int = DEFAULT_MAX_TICKS,
    done_tail: int = DONE_TAIL_TICKS,
    stop_event: asyncio.Event | None = None,
    ready_event: asyncio.Event | None = None,
) -> LiveResult:
    """Host a live session over TCP and WebSocket and run it to completion.

    The scenario starts immediately with autostart, otherwise on the first
    ScenarioCmd{start} from the pedestrian. A reset command rebuilds the
    world and begins a fresh recording.
    """
    world = World(config, map_model)
    gateway = Gateway(WALKER_ID, map_model.digest, config.dt_ms, config.play_area)
    server = GatewayServer(
        gateway, host, tcp_port, http_port, static_dir,
        map_geometry=map_geometry_jsonable(map_model),
    )
    await server.start()
    if ready_event is not None:
        ready_event.set()

    driver_sid: int | None = None
    if driver is not None:
        driver_sid = gateway.connect()
        gateway.handle_message(driver_sid, proto.Hello(proto.ROLE_PEDESTRIAN, "scripted-driver"))
        gateway.sessions[driver_sid].pop_outgoing()  # consume the Ack locally

    rec = _new_recording(config, map_model)
    recorder = TimingRecorder(Mode.LIVE, config.dt)
    if autostart:
        world.start_scenario()

    snapshot = None
    ticks_after_done = 0
    try:
        for _ in range(max_ticks):
            if stop_event is not None and stop_event.is_set():
                break
            t0 = time.perf_counter()

            for cmd in gateway.drain_commands():
                current = apply_scenario_overrides(config, cmd.overrides)
                if cmd.action == "reset" or current.scenario != config.scenario:
                    config = current
                    world = World(config, map_model)
                    rec = _new_recording(config, map_model)
                    snapshot = None
                world.start_scenario()

            if driver is not None and driver_sid is not None:
                gateway.handle_message(driver_sid, proto.Walk(driver.next_intent(snapshot)))
            snapshot = world.step(gateway.drain_input())
            record_tick(rec, snapshot)
            gateway.broadcast_snapshot(snapshot)
            server.flush_outgoing()

            recorder.note_tick(time.perf_counter() - t0)
            if snapshot.scenario_phase.value == "done":
                ticks_after_done += 1
                if ticks_after_done > done_tail:
                    break
            if realtime:
                leftover = config.dt - (time.perf_counter() - t0)
                await asyncio.sleep(leftover if leftover > 0.0 else 0.0)
            else:
                await asyncio.sleep(0.0)
    finally:
        await server.stop()

    return LiveResult(recording=rec, timing=measure_timing(recorder), world=world)
