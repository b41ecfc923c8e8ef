import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pediloop.geom import Quat, Transform, Vec3
from pediloop.worldsim import VehicleState
from pediloop.worldsim.audio import AMBIENT_LEVEL, compute_audio_levels, engine_gain


def listener_at(x=0.0, y=0.0, yaw=0.0) -> Transform:
    return Transform(Vec3(x, y, 1.7), Quat.from_yaw(yaw))


def vehicle_at(x, y, throttle=0.0, vid=1) -> VehicleState:
    return VehicleState(id=vid, transform=Transform(Vec3(x, y, 0.0), Quat.identity()), throttle=throttle)


def level_of(listener, vehicle) -> tuple[float, float]:
    levels, _ = compute_audio_levels(listener, (vehicle,))
    (vid, lv), = levels
    assert vid == vehicle.id
    return lv.level, lv.pan


def test_zero_distance_full_throttle_is_max():
    level, _ = level_of(listener_at(), vehicle_at(0.0, 0.0, throttle=1.0))
    assert level == 1.0


def test_half_level_at_reference_distance():
    # g / (1 + (10/10)^2) = 1.0 / 2
    level, _ = level_of(listener_at(), vehicle_at(10.0, 0.0, throttle=1.0))
    assert level == pytest.approx(0.5, abs=1e-12)


def test_idle_gain_floor():
    assert engine_gain(0.0) == pytest.approx(0.2)
    assert engine_gain(1.0) == pytest.approx(1.0)


def test_pan_ahead_is_zero_right_is_one():
    _, pan_ahead = level_of(listener_at(), vehicle_at(5.0, 0.0))
    assert pan_ahead == pytest.approx(0.0, abs=1e-12)
    _, pan_right = level_of(listener_at(), vehicle_at(0.0, -5.0))
    assert pan_right == pytest.approx(1.0, abs=1e-12)
    _, pan_left = level_of(listener_at(), vehicle_at(0.0, 5.0))
    assert pan_left == pytest.approx(-1.0, abs=1e-12)


def test_pan_follows_listener_facing():
    # listener facing +Y: a source at +X is to its right
    _, pan = level_of(listener_at(yaw=math.pi / 2.0), vehicle_at(5.0, 0.0))
    assert pan == pytest.approx(1.0, abs=1e-12)


def test_ambient_constant():
    _, ambient = compute_audio_levels(listener_at(), ())
    assert ambient == AMBIENT_LEVEL == 0.1


@given(d1=st.floats(0.1, 80.0), d2=st.floats(0.1, 80.0))
def test_level_strictly_decreasing_in_distance(d1, d2):
    if abs(d1 - d2) < 1e-9:
        return
    near, far = sorted((d1, d2))
    l_near, _ = level_of(listener_at(), vehicle_at(near, 0.0, throttle=0.5))
    l_far, _ = level_of(listener_at(), vehicle_at(far, 0.0, throttle=0.5))
    assert l_near > l_far


@given(t1=st.floats(0.0, 1.0), t2=st.floats(0.0, 1.0))
def test_level_strictly_increasing_in_throttle(t1, t2):
    if abs(t1 - t2) < 1e-9:
        return
    lo, hi = sorted((t1, t2))
    l_lo, _ = level_of(listener_at(), vehicle_at(7.0, 0.0, throttle=lo))
    l_hi, _ = level_of(listener_at(), vehicle_at(7.0, 0.0, throttle=hi))
    assert l_hi > l_lo


@given(
    x=st.floats(-60.0, 60.0),
    y=st.floats(-60.0, 60.0),
    throttle=st.floats(0.0, 1.0),
)
def test_outputs_always_in_range(x, y, throttle):
    level, pan = level_of(listener_at(), vehicle_at(x, y, throttle=throttle))
    assert 0.0 <= level <= 1.0
    assert -1.0 <= pan <= 1.0
