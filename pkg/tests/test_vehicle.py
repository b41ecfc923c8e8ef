import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pediloop.errors import ControlError
from pediloop.geom import Quat, Transform, Vec3
from pediloop.worldsim import (
    BehaviorFlags,
    DEFAULT_MODEL,
    VehicleState,
    apply_vehicle_control,
    brake_command_for_decel,
    integrate_vehicle,
)

DT = 0.055


def make_vehicle(speed=0.0, speed_limit=13.89, **kwargs) -> VehicleState:
    return VehicleState(
        id=1,
        transform=Transform(Vec3(0.0, 0.0, 0.0), Quat.identity()),
        speed=speed,
        behavior=BehaviorFlags(speed_limit=speed_limit),
        **kwargs,
    )


def stopping_distance(v0: float, brake: float, model=DEFAULT_MODEL) -> float:
    """Simulate a full stop under a constant brake command."""
    v = make_vehicle(speed=v0, speed_limit=max(v0, 13.89))
    v = apply_vehicle_control(v, 0.0, brake, 0.0, DT, model)
    while v.speed > 0.0:
        v = integrate_vehicle(v, DT, model)
        v = apply_vehicle_control(v, 0.0, brake, 0.0, DT, model)
    return v.transform.position.x


def test_brake_step_hand_value():
    # 10 - (8.0 + 0.1) * 0.055 = 9.5545
    v = make_vehicle(speed=10.0)
    v = apply_vehicle_control(v, 0.0, 1.0, 0.0, DT)
    v = integrate_vehicle(v, DT)
    assert v.speed == pytest.approx(9.5545, abs=1e-12)


def test_standstill_has_no_rolling_creep():
    v = make_vehicle(speed=0.0)
    v = integrate_vehicle(v, DT)
    assert v.speed == 0.0
    assert v.transform.position.x == 0.0


def test_full_brake_stopping_distance_closed_form():
    # closed-form oracle: v^2 / (2 * B_max), tolerance one tick of travel
    v0 = 8.33
    dist = stopping_distance(v0, brake=1.0)
    expected = v0 * v0 / (2.0 * DEFAULT_MODEL.b_max)
    assert abs(dist - expected) <= v0 * DT


@pytest.mark.parametrize("v0", [5.0, 8.33, 15.0])
def test_kinematic_consistency_across_speeds(v0):
    dist = stopping_distance(v0, brake=1.0)
    expected = v0 * v0 / (2.0 * DEFAULT_MODEL.b_max)
    assert abs(dist - expected) <= v0 * DT


@pytest.mark.parametrize("v0,decel", [(8.33, 6.0), (8.33, 2.0), (15.0, 8.0)])
def test_commanded_decel_matches_closed_form(v0, decel):
    brake = brake_command_for_decel(decel)
    dist = stopping_distance(v0, brake=brake)
    expected = v0 * v0 / (2.0 * decel)
    assert abs(dist - expected) <= v0 * DT


def test_control_clamping_examples():
    v = make_vehicle(speed=1.0)
    v = apply_vehicle_control(v, 1.5, 0.0, 0.0, DT)
    assert v.throttle <= 1.0
    v = apply_vehicle_control(v, 0.0, 0.0, -2.0, DT)
    assert v.steer == -1.0


def test_nan_control_rejected():
    v = make_vehicle()
    with pytest.raises(ControlError):
        apply_vehicle_control(v, float("nan"), 0.0, 0.0, DT)
    with pytest.raises(ControlError):
        apply_vehicle_control(v, 0.0, float("inf"), 0.0, DT)


def test_speed_limit_governor():
    limit = 10.0
    v = make_vehicle(speed=limit, speed_limit=limit)
    for _ in range(50):
        v = apply_vehicle_control(v, 1.0, 0.0, 0.0, DT)
        v = integrate_vehicle(v, DT)
        assert v.speed <= limit + 1e-12


def test_governor_reaches_but_never_exceeds_limit():
    limit = 8.0
    v = make_vehicle(speed=0.0, speed_limit=limit)
    for _ in range(600):
        v = apply_vehicle_control(v, 1.0, 0.0, 0.0, DT)
        v = integrate_vehicle(v, DT)
    assert v.speed == pytest.approx(limit, abs=1e-9)


@given(
    throttle=st.floats(allow_nan=False, allow_infinity=False, width=64),
    brake=st.floats(allow_nan=False, allow_infinity=False, width=64),
    steer=st.floats(allow_nan=False, allow_infinity=False, width=64),
    speed=st.floats(0.0, 30.0),
)
def test_controls_always_clamped(throttle, brake, steer, speed):
    v = make_vehicle(speed=speed, speed_limit=35.0)
    v = apply_vehicle_control(v, throttle, brake, steer, DT)
    assert 0.0 <= v.throttle <= 1.0
    assert 0.0 <= v.brake <= 1.0
    assert -1.0 <= v.steer <= 1.0


def test_bicycle_heading_advance():
    # full left steer at 5 m/s: yaw rate = v * tan(35 deg) / 2.7
    v = make_vehicle(speed=5.0)
    v = apply_vehicle_control(v, 0.0, 0.0, 1.0, DT)
    v = integrate_vehicle(v, DT)
    expected_rate = v.speed * math.tan(DEFAULT_MODEL.max_steer) / DEFAULT_MODEL.wheelbase
    assert v.transform.orientation.yaw() == pytest.approx(expected_rate * DT, rel=1e-9)
