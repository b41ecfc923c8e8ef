"""Minimal 3D/2D geometry types shared by the whole simulator.

World frame convention: right-handed, Z up, X forward, yaw counter-clockwise
positive. All lengths are meters, all angles radians unless a name says
otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

_QUAT_NORM_TOL = 1e-6


@dataclass(frozen=True)
class Vec3:
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __add__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def scaled(self, k: float) -> "Vec3":
        return Vec3(self.x * k, self.y * k, self.z * k)

    def dot(self, other: "Vec3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def norm(self) -> float:
        return math.sqrt(self.dot(self))

    def xy(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class Quat:
    """Unit quaternion (w, x, y, z)."""

    w: float = 1.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __post_init__(self) -> None:
        n = math.sqrt(self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z)
        if abs(n - 1.0) > _QUAT_NORM_TOL:
            raise ValueError(f"quaternion norm {n} not within {_QUAT_NORM_TOL} of 1")

    def __mul__(self, other: "Quat") -> "Quat":
        w1, x1, y1, z1 = self.w, self.x, self.y, self.z
        w2, x2, y2, z2 = other.w, other.x, other.y, other.z
        return Quat(
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        )

    def conjugate(self) -> "Quat":
        return Quat(self.w, -self.x, -self.y, -self.z)

    def rotate(self, v: Vec3) -> Vec3:
        # q v q* expanded; avoids building intermediate quaternions
        w, x, y, z = self.w, self.x, self.y, self.z
        tx = 2.0 * (y * v.z - z * v.y)
        ty = 2.0 * (z * v.x - x * v.z)
        tz = 2.0 * (x * v.y - y * v.x)
        return Vec3(
            v.x + w * tx + (y * tz - z * ty),
            v.y + w * ty + (z * tx - x * tz),
            v.z + w * tz + (x * ty - y * tx),
        )

    def angle_to(self, other: "Quat") -> float:
        """Smallest rotation angle between two orientations, radians."""
        dot = abs(self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z)
        return 2.0 * math.acos(min(1.0, dot))

    @staticmethod
    def identity() -> "Quat":
        return Quat(1.0, 0.0, 0.0, 0.0)

    @staticmethod
    def from_axis_angle(axis: Vec3, angle: float) -> "Quat":
        n = axis.norm()
        if n == 0.0:
            raise ValueError("rotation axis must be non-zero")
        h = 0.5 * angle
        s = math.sin(h) / n
        return Quat(math.cos(h), axis.x * s, axis.y * s, axis.z * s)

    @staticmethod
    def from_yaw(yaw: float) -> "Quat":
        h = 0.5 * yaw
        return Quat(math.cos(h), 0.0, 0.0, math.sin(h))

    def yaw(self) -> float:
        """Heading about world Z extracted from the full orientation."""
        fwd = self.rotate(Vec3(1.0, 0.0, 0.0))
        return math.atan2(fwd.y, fwd.x)

    def normalized(self) -> "Quat":
        n = math.sqrt(self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z)
        return Quat(self.w / n, self.x / n, self.y / n, self.z / n)


@dataclass(frozen=True)
class Transform:
    position: Vec3 = Vec3()
    orientation: Quat = Quat()

    def apply(self, v: Vec3) -> Vec3:
        return self.position + self.orientation.rotate(v)

    def compose(self, child: "Transform") -> "Transform":
        """self ∘ child: child expressed in self's frame, result in world."""
        return Transform(self.apply(child.position), self.orientation * child.orientation)

    @staticmethod
    def identity() -> "Transform":
        return Transform(Vec3(), Quat())


def quat_slerp(a: Quat, b: Quat, t: float) -> Quat:
    """Spherical interpolation along the shorter arc."""
    dot = a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z
    bw, bx, by, bz = b.w, b.x, b.y, b.z
    if dot < 0.0:
        dot = -dot
        bw, bx, by, bz = -bw, -bx, -by, -bz
    dot = min(1.0, dot)
    theta = math.acos(dot)
    if theta < 1e-9:
        # nearly parallel: nlerp is exact enough
        q = Quat(
            a.w + (bw - a.w) * t,
            a.x + (bx - a.x) * t,
            a.y + (by - a.y) * t,
            a.z + (bz - a.z) * t,
        )
        return q.normalized()
    s = math.sin(theta)
    ka = math.sin((1.0 - t) * theta) / s
    kb = math.sin(t * theta) / s
    return Quat(
        ka * a.w + kb * bw,
        ka * a.x + kb * bx,
        ka * a.y + kb * by,
        ka * a.z + kb * bz,
    ).normalized()


@dataclass(frozen=True)
class Rect2:
    """Axis-aligned rectangle, e.g. the tracking-space play area."""

    min_x: float
    min_y: float
    width: float
    height: float

    def __post_init__(self) -> None:
        if self.width <= 0.0 or self.height <= 0.0:
            raise ValueError("rectangle must have positive area")

    def contains(self, x: float, y: float) -> bool:
        return (self.min_x <= x <= self.min_x + self.width
                and self.min_y <= y <= self.min_y + self.height)

    def clamp(self, x: float, y: float) -> tuple[float, float]:
        cx = min(max(x, self.min_x), self.min_x + self.width)
        cy = min(max(y, self.min_y), self.min_y + self.height)
        return (cx, cy)


@dataclass(frozen=True)
class OrientedRect2:
    """Rectangle with a world-space anchor corner and yaw, e.g. the play area
    footprint on the map."""

    anchor_x: float
    anchor_y: float
    yaw: float
    width: float
    height: float

    def __post_init__(self) -> None:
        if self.width <= 0.0 or self.height <= 0.0:
            raise ValueError("rectangle must have positive area")

    def to_world(self, u: float, v: float) -> tuple[float, float]:
        c, s = math.cos(self.yaw), math.sin(self.yaw)
        return (self.anchor_x + c * u - s * v, self.anchor_y + s * u + c * v)

    def to_local(self, x: float, y: float) -> tuple[float, float]:
        c, s = math.cos(self.yaw), math.sin(self.yaw)
        dx, dy = x - self.anchor_x, y - self.anchor_y
        return (c * dx + s * dy, -s * dx + c * dy)

    def contains(self, x: float, y: float) -> bool:
        u, v = self.to_local(x, y)
        return 0.0 <= u <= self.width and 0.0 <= v <= self.height

    def clamp(self, x: float, y: float) -> tuple[float, float]:
        """Project a world point onto the rectangle (nearest interior point)."""
        u, v = self.to_local(x, y)
        u = min(max(u, 0.0), self.width)
        v = min(max(v, 0.0), self.height)
        return self.to_world(u, v)


def wrap_angle(a: float) -> float:
    """Wrap to (-pi, pi]."""
    a = math.fmod(a, 2.0 * math.pi)
    if a > math.pi:
        a -= 2.0 * math.pi
    elif a <= -math.pi:
        a += 2.0 * math.pi
    return a
