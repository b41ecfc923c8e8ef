import json
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pediloop.driver import ScriptedPedestrian
from pediloop.errors import DecodeError, UnknownTagError
from pediloop.gateway import protocol as proto
from pediloop.geom import OrientedRect2, Quat, Rect2, Transform, Vec3
from pediloop.runtime import run_live
from pediloop.worldsim import PlayArea, PoseInput, WalkIntent
from pediloop.worldsim.types import EventKind, ScenarioEvent


def play_area() -> PlayArea:
    return PlayArea(Rect2(0.0, 0.0, 4.0, 4.0), OrientedRect2(47.0, -7.0, 0.0, 9.0, 14.0))


def sample_messages(bundled_map, yield_aggressive_config):
    result = run_live(yield_aggressive_config, bundled_map, driver=ScriptedPedestrian(bundled_map), max_ticks=120)
    snap = result.recording.snapshots[100]
    pose = PoseInput(
        head=Transform(Vec3(1.0, 2.0, 1.7), Quat.from_yaw(0.4)),
        timestamp=12.5,
        hands=(Transform(Vec3(0.9, 2.1, 1.2), Quat.identity()), None),
        body_joints=tuple(Quat.from_yaw(0.01 * i) for i in range(17)),
    )
    return [
        proto.Hello(role="pedestrian", name="p1"),
        proto.Hello(role="spectator", name=""),
        proto.Ack(avatar_id=100, map_digest="ab" * 32, dt_ms=55, play_area=play_area()),
        proto.Pose(pose),
        proto.Pose(PoseInput(head=Transform.identity(), timestamp=0.0)),
        proto.Walk(WalkIntent(forward=1.4, strafe=-0.2, turn=0.1)),
        proto.ScenarioCmd(action="start", overrides={}),
        proto.ScenarioCmd(action="reset", overrides={"yield_policy": "ignore", "decel": 2.0}),
        proto.Snapshot(snap),
        proto.Event(ScenarioEvent(EventKind.VEHICLE_YIELDING, 1)),
        proto.Event(ScenarioEvent(EventKind.PHASE_CHANGED, -1, "done")),
        proto.Error(code="protocol", detail="hello required"),
    ]


def test_round_trip_every_variant(bundled_map, yield_aggressive_config):
    for msg in sample_messages(bundled_map, yield_aggressive_config):
        raw = proto.encode_message(msg)
        assert b"\n" not in raw  # one message per line: framing adds the newline
        decoded = proto.decode_message(raw)
        assert decoded == msg


def test_every_message_carries_protocol_version(bundled_map, yield_aggressive_config):
    for msg in sample_messages(bundled_map, yield_aggressive_config):
        body = json.loads(proto.encode_message(msg))
        assert body["v"] == proto.PROTOCOL_VERSION


def test_unknown_fields_ignored():
    raw = json.dumps(
        {"tag": "walk", "v": "1", "forward": 1.0, "future_field": {"x": 1}}
    ).encode()
    msg = proto.decode_message(raw)
    assert isinstance(msg, proto.Walk)
    assert msg.intent.forward == 1.0


def test_unknown_tag_keeps_connection_semantics():
    raw = json.dumps({"tag": "teleport", "v": "1"}).encode()
    with pytest.raises(UnknownTagError) as err:
        proto.decode_message(raw)
    assert "teleport" in str(err.value)


def test_truncated_line_reports_offset():
    intact = proto.encode_message(proto.Hello(role="pedestrian", name="p1"))
    with pytest.raises(DecodeError) as err:
        proto.decode_message(intact[: len(intact) // 2])
    assert err.value.offset is not None


def test_missing_version_rejected():
    with pytest.raises(DecodeError):
        proto.decode_message(b'{"tag": "walk", "forward": 1.0}')


def test_wrong_version_rejected():
    with pytest.raises(DecodeError):
        proto.decode_message(b'{"tag": "walk", "v": "2", "forward": 1.0}')


def test_non_object_rejected():
    with pytest.raises(DecodeError):
        proto.decode_message(b"[1, 2, 3]")
    with pytest.raises(DecodeError):
        proto.decode_message(b'"hello"')


def test_bad_role_rejected():
    with pytest.raises(DecodeError):
        proto.decode_message(b'{"tag": "hello", "v": "1", "role": "driver"}')


def test_non_finite_numbers_rejected():
    with pytest.raises(DecodeError):
        proto.decode_message(b'{"tag": "walk", "v": "1", "forward": NaN}')
    with pytest.raises(DecodeError):
        proto.decode_message(b'{"tag": "walk", "v": "1", "forward": Infinity}')


def test_fuzz_decoder_is_total():
    """10^5 random frames: decode returns a Message or raises DecodeError,
    never anything else."""
    rng = random.Random(0xFADE)
    corpus_seeds = [
        b"", b"{}", b"{", b'{"tag":',
        proto.encode_message(proto.Hello(role="pedestrian", name="p1")),
        proto.encode_message(proto.Walk(WalkIntent(forward=1.0))),
    ]
    for i in range(100_000):
        if i % 3 == 0:
            raw = bytes(rng.randrange(256) for _ in range(rng.randrange(0, 40)))
        elif i % 3 == 1:
            base = bytearray(corpus_seeds[rng.randrange(len(corpus_seeds))])
            for _ in range(rng.randrange(1, 4)):
                if base:
                    base[rng.randrange(len(base))] = rng.randrange(256)
            raw = bytes(base)
        else:
            raw = ("{" + "".join(rng.choice('"abc:123,{}[]tf ') for _ in range(rng.randrange(0, 30)))).encode()
        try:
            msg = proto.decode_message(raw)
        except DecodeError:
            continue
        assert isinstance(
            msg,
            (proto.Hello, proto.Ack, proto.Pose, proto.Walk, proto.ScenarioCmd, proto.Snapshot, proto.Event, proto.Error),
        )


@settings(max_examples=200)
@given(
    forward=st.floats(-10, 10),
    strafe=st.floats(-10, 10),
    turn=st.floats(-6, 6),
)
def test_walk_round_trip_randomized(forward, strafe, turn):
    msg = proto.Walk(WalkIntent(forward=forward, strafe=strafe, turn=turn))
    assert proto.decode_message(proto.encode_message(msg)) == msg


@settings(max_examples=100)
@given(
    x=st.floats(-100, 100),
    y=st.floats(-100, 100),
    z=st.floats(-5, 5),
    yaw=st.floats(-math.pi, math.pi),
    t=st.floats(0, 1e6),
)
def test_pose_round_trip_randomized(x, y, z, yaw, t):
    pose = PoseInput(head=Transform(Vec3(x, y, z), Quat.from_yaw(yaw)), timestamp=t)
    msg = proto.Pose(pose)
    assert proto.decode_message(proto.encode_message(msg)) == msg


def test_shared_schema_fixtures_stay_valid():
    """The fixture file shared with the browser client decodes cleanly and
    re-encodes byte-identically (regenerate with
    tools/generate_protocol_fixtures.py when the schema changes)."""
    from pathlib import Path

    fixture_path = Path(__file__).resolve().parents[1] / "frontend" / "tests" / "fixtures" / "protocol_fixtures.jsonl"
    lines = fixture_path.read_text().splitlines()
    assert len(lines) >= 12
    tags = set()
    for line in lines:
        msg = proto.decode_message(line.encode("utf-8"))
        assert proto.encode_message(msg).decode("utf-8") == line
        tags.add(json.loads(line)["tag"])
    assert tags == {"hello", "ack", "pose", "walk", "scenario", "snapshot", "event", "error"}
