"""Vehicle longitudinal point-mass + kinematic bicycle model.

The model is deliberately simple enough to check against closed-form
kinematics: acceleration is throttle*A_MAX - brake*B_MAX - C_ROLL, clamped so
speed never goes negative, and heading follows the bicycle yaw rate
speed * tan(steer * MAX_STEER) / WHEELBASE. Speed is updated first, then the
position moves with the new speed (semi-implicit Euler).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

from ..errors import ControlError
from ..geom import Quat, Transform, Vec3
from .types import VehicleState


@dataclass(frozen=True)
class VehicleModel:
    a_max: float = 3.5  # m/s^2 full-throttle acceleration
    b_max: float = 8.0  # m/s^2 full-brake deceleration
    c_roll: float = 0.1  # m/s^2 rolling resistance
    wheelbase: float = 2.7  # m
    max_steer: float = math.radians(35.0)


DEFAULT_MODEL = VehicleModel()


def apply_vehicle_control(
    v: VehicleState,
    throttle: float,
    brake: float,
    steer: float,
    dt: float,
    model: VehicleModel = DEFAULT_MODEL,
) -> VehicleState:
    """Clamp controls into range and cap throttle so the next integration
    step cannot push the vehicle past its speed limit."""
    for name, value in (("throttle", throttle), ("brake", brake), ("steer", steer)):
        if not math.isfinite(value):
            raise ControlError(f"{name} must be finite, got {value}")
    throttle = min(max(throttle, 0.0), 1.0)
    brake = min(max(brake, 0.0), 1.0)
    steer = min(max(steer, -1.0), 1.0)

    # speed-limit governor: largest throttle that keeps next-tick speed legal
    limit = v.behavior.speed_limit
    if dt > 0.0:
        headroom = (limit - v.speed) / dt + brake * model.b_max + model.c_roll
        throttle = min(throttle, max(0.0, headroom / model.a_max))
        throttle = min(throttle, 1.0)
    return replace(v, throttle=throttle, brake=brake, steer=steer)


def integrate_vehicle(v: VehicleState, dt: float, model: VehicleModel = DEFAULT_MODEL) -> VehicleState:
    """Advance one tick. Pure: returns the successor state."""
    accel = v.throttle * model.a_max - v.brake * model.b_max - model.c_roll
    speed = max(0.0, v.speed + accel * dt)

    yaw = v.transform.orientation.yaw()
    if v.steer != 0.0 and speed > 0.0:
        yaw_rate = speed * math.tan(v.steer * model.max_steer) / model.wheelbase
        yaw += yaw_rate * dt
    heading = Quat.from_yaw(yaw)

    pos = v.transform.position
    step = heading.rotate(Vec3(speed * dt, 0.0, 0.0))
    new_pos = Vec3(pos.x + step.x, pos.y + step.y, pos.z)
    return replace(v, transform=Transform(new_pos, heading), speed=speed)


def brake_command_for_decel(decel: float, model: VehicleModel = DEFAULT_MODEL) -> float:
    """Brake pedal value producing a given total deceleration once rolling
    resistance is accounted for. Clamped to the pedal range."""
    return min(max((decel - model.c_roll) / model.b_max, 0.0), 1.0)


def cruise_throttle(model: VehicleModel = DEFAULT_MODEL) -> float:
    """Throttle that exactly cancels rolling resistance (holds speed)."""
    return model.c_roll / model.a_max
