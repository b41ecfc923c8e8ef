"""Regenerate the shared protocol schema fixtures consumed by both the
Python gateway tests and the browser client tests.

Each line of frontend/tests/fixtures/protocol_fixtures.jsonl is one encoded
message exactly as it travels on the wire.
"""
from __future__ import annotations

from pathlib import Path

from pediloop.gateway import protocol as proto
from pediloop.geom import OrientedRect2, Quat, Rect2, Transform, Vec3
from pediloop.driver import ScriptedPedestrian
from pediloop.opendrive import parse_opendrive
from pediloop.runtime import run_live
from pediloop.worldsim import PlayArea, PoseInput, WalkIntent, load_world_config
from pediloop.worldsim.types import EventKind, ScenarioEvent

OUT = Path(__file__).resolve().parents[1] / "frontend" / "tests" / "fixtures" / "protocol_fixtures.jsonl"
DATA = Path(__file__).resolve().parents[1] / "src" / "pediloop" / "data"


def fixture_messages() -> list[proto.Message]:
    config = load_world_config(DATA / "scenario_yield_aggressive.ini")
    map_model = parse_opendrive(config.map_path.read_text())
    result = run_live(config, map_model, driver=ScriptedPedestrian(map_model), max_ticks=140)
    snapshots = result.recording.snapshots
    area = PlayArea(Rect2(0.0, 0.0, 4.0, 4.0), OrientedRect2(47.0, -7.0, 0.0, 9.0, 14.0))
    return [
        proto.Hello(role="pedestrian", name="p1"),
        proto.Hello(role="spectator", name="viewer"),
        proto.Ack(avatar_id=100, map_digest=map_model.digest, dt_ms=55, play_area=area),
        proto.Ack(avatar_id=-1, map_digest=map_model.digest, dt_ms=55, play_area=area),
        proto.Pose(
            PoseInput(
                head=Transform(Vec3(2.0, 2.0, 1.7), Quat.from_yaw(0.3)),
                timestamp=1.25,
            )
        ),
        proto.Walk(WalkIntent(forward=1.4, strafe=0.0, turn=0.0)),
        proto.Walk(WalkIntent()),
        proto.ScenarioCmd(action="start", overrides={}),
        proto.ScenarioCmd(action="reset", overrides={"decel": 2.0, "yield_policy": "ignore"}),
        proto.Snapshot(snapshots[0]),
        proto.Snapshot(snapshots[90]),
        proto.Snapshot(snapshots[139]),
        proto.Event(ScenarioEvent(EventKind.VEHICLE_YIELDING, 1)),
        proto.Event(ScenarioEvent(EventKind.EHMI_CHANGED, 1, "on")),
        proto.Event(ScenarioEvent(EventKind.PHASE_CHANGED, -1, "done")),
        proto.Error(code="pedestrian_taken", detail="a pedestrian session is already active"),
        proto.Error(code="decode", detail="frame is not valid JSON"),
    ]


def main() -> None:
    OUT.parent.mkdir(parents=True, exist_ok=True)
    lines = [proto.encode_message(m).decode("utf-8") for m in fixture_messages()]
    OUT.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {OUT} ({len(lines)} messages)")


if __name__ == "__main__":
    main()
