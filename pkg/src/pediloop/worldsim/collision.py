"""Walker-capsule vs vehicle-box collision test.

Vehicles are oriented boxes sitting on the ground plane (transform position
is the ground-center of the footprint). A capsule hits a box when the
minimum distance between its axis segment and the box is at most the capsule
radius. That distance is found by ternary search: point-to-box distance is
convex, and so is its restriction to a segment.
"""
from __future__ import annotations

import math

from ..geom import Vec3
from .types import Capsule, EventKind, ScenarioEvent, VehicleState, WalkerState

_TERNARY_ITERS = 60  # (2/3)^60 interval shrink, far below any tolerance here


def box_center(v: VehicleState) -> Vec3:
    return v.transform.apply(Vec3(0.0, 0.0, v.dims.height / 2.0))


def box_half_extents(v: VehicleState) -> tuple[float, float, float]:
    return (v.dims.length / 2.0, v.dims.width / 2.0, v.dims.height / 2.0)


def _to_box_frame(v: VehicleState, p: Vec3) -> Vec3:
    center = box_center(v)
    return v.transform.orientation.conjugate().rotate(p - center)


def _point_box_dist_sq(p: Vec3, h: tuple[float, float, float]) -> float:
    dx = max(0.0, abs(p.x) - h[0])
    dy = max(0.0, abs(p.y) - h[1])
    dz = max(0.0, abs(p.z) - h[2])
    return dx * dx + dy * dy + dz * dz


def segment_box_distance(a: Vec3, b: Vec3, v: VehicleState) -> float:
    """Minimum distance from segment ab (world) to the vehicle's box."""
    la = _to_box_frame(v, a)
    lb = _to_box_frame(v, b)
    hx, hy, hz = box_half_extents(v)
    ax, ay, az = la.x, la.y, la.z
    dx, dy, dz = lb.x - ax, lb.y - ay, lb.z - az

    def f(t: float) -> float:
        px = max(0.0, abs(ax + dx * t) - hx)
        py = max(0.0, abs(ay + dy * t) - hy)
        pz = max(0.0, abs(az + dz * t) - hz)
        return px * px + py * py + pz * pz

    lo, hi = 0.0, 1.0
    for _ in range(_TERNARY_ITERS):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if f(m1) <= f(m2):
            hi = m2
        else:
            lo = m1
    return math.sqrt(min(f(lo), f(hi), f((lo + hi) / 2.0)))


def capsule_hits_vehicle(c: Capsule, v: VehicleState) -> bool:
    # cheap lower bound: midpoint distance minus half the segment length
    mid = Vec3((c.a.x + c.b.x) / 2.0, (c.a.y + c.b.y) / 2.0, (c.a.z + c.b.z) / 2.0)
    half_seg = (c.b - c.a).norm() / 2.0
    d_mid = math.sqrt(_point_box_dist_sq(_to_box_frame(v, mid), box_half_extents(v)))
    if d_mid - half_seg > c.radius:
        return False
    return segment_box_distance(c.a, c.b, v) <= c.radius


def check_collision(
    walker: WalkerState,
    vehicles: tuple[VehicleState, ...],
    already_collided: set[int],
) -> list[ScenarioEvent]:
    """Collision events for vehicles newly touching the walker this tick.

    already_collided is mutated: a vehicle reports at most once per run.
    """
    events: list[ScenarioEvent] = []
    for v in vehicles:
        if v.id in already_collided:
            continue
        if _clearly_apart(walker, v):
            continue
        if any(capsule_hits_vehicle(c, v) for c in walker.capsules):
            already_collided.add(v.id)
            events.append(ScenarioEvent(EventKind.COLLISION, v.id))
    return events


_WALKER_REACH = 2.5  # bounding radius of any capsule point around the root


def _clearly_apart(walker: WalkerState, v: VehicleState) -> bool:
    half = box_half_extents(v)
    box_radius = math.sqrt(half[0] ** 2 + half[1] ** 2 + half[2] ** 2)
    d = (walker.root.position - box_center(v)).norm()
    return d > _WALKER_REACH + box_radius
