"""Replay-time simulated perception: ray-cast LiDAR and a depth camera.

The scene a sensor sees is rebuilt from snapshot geometry alone: the ground
plane z=0, every vehicle's oriented box, and the walker's capsules. Rays are
generated in a fixed channel-major order and all intersections are analytic,
so identical snapshot + config always produce byte-identical output.

Sensors exist only during replay; constructing or invoking them in live mode
raises ModeViolationError (the live scheduler additionally never calls them,
which tests enforce with a spy).
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import ModeViolationError, SessionError
from .geom import Transform, Vec3
from .recording import Mode, TimingRecorder
from .worldsim.types import VehicleState, WorldSnapshot

GROUND_LABEL = -1  # ground hits carry no actor label

_EPS = 1e-12


@dataclass(frozen=True)
class LidarConfig:
    vehicle_id: int
    mount: Transform = field(
        default_factory=lambda: Transform(Vec3(0.0, 0.0, 1.8))
    )
    channels: int = 32
    fov_deg: tuple[float, float] = (-15.0, 5.0)
    points_per_channel: int = 1024
    range_max: float = 50.0

    def __post_init__(self) -> None:
        if self.channels < 1 or self.points_per_channel < 1:
            raise ValueError("channels and points_per_channel must be >= 1")
        if self.range_max <= 0.0:
            raise ValueError("range_max must be positive")
        if self.fov_deg[0] >= self.fov_deg[1]:
            raise ValueError("vertical FOV must satisfy lo < hi")


@dataclass(frozen=True)
class DepthCameraConfig:
    vehicle_id: int
    mount: Transform = field(
        default_factory=lambda: Transform(Vec3(0.0, 0.0, 1.6))
    )
    width: int = 64
    height: int = 64
    fov_h_deg: float = 90.0

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError("image must be at least 1x1")
        if not 0.0 < self.fov_h_deg < 180.0:
            raise ValueError("horizontal FOV must be in (0, 180) degrees")


@dataclass(frozen=True)
class LidarScan:
    """Hit points in the sensor frame; misses return no point."""

    points: np.ndarray  # (N, 3) float64
    ranges: np.ndarray  # (N,) float64
    labels: np.ndarray  # (N,) int64, GROUND_LABEL for unlabeled ground

    def __eq__(self, other) -> bool:  # value semantics for tests
        return (
            isinstance(other, LidarScan)
            and np.array_equal(self.points, other.points)
            and np.array_equal(self.ranges, other.ranges)
            and np.array_equal(self.labels, other.labels)
        )


@dataclass(frozen=True)
class DepthImage:
    width: int
    height: int
    fov_h_deg: float
    depth: np.ndarray  # (H, W) float64, along-ray distance, inf for miss

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DepthImage)
            and self.width == other.width
            and self.height == other.height
            and self.fov_h_deg == other.fov_h_deg
            and np.array_equal(self.depth, other.depth)
        )


def _require_replay(mode: Mode) -> None:
    if mode is not Mode.REPLAY:
        raise ModeViolationError("sensor operations are replay-only; live mode is sensor-free")


def _vehicle(snapshot: WorldSnapshot, vehicle_id: int) -> VehicleState:
    for v in snapshot.vehicles:
        if v.id == vehicle_id:
            return v
    raise SessionError(f"sensor mounted on unknown vehicle {vehicle_id}")


def _rotation_matrix(t: Transform) -> np.ndarray:
    q = t.orientation
    w, x, y, z = q.w, q.x, q.y, q.z
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
            [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
            [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
        ]
    )


def cast_rays(
    origin: np.ndarray, dirs: np.ndarray, snapshot: WorldSnapshot, range_max: float
) -> tuple[np.ndarray, np.ndarray]:
    """Nearest intersection per ray: (t, label). t is inf for misses.

    dirs must be unit vectors, world frame. Labels: actor id, or GROUND_LABEL
    for the ground plane.
    """
    n = dirs.shape[0]
    best_t = np.full(n, np.inf)
    best_label = np.full(n, GROUND_LABEL, dtype=np.int64)

    # ground plane z = 0
    dz = dirs[:, 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        t_ground = np.where(np.abs(dz) > _EPS, -origin[2] / dz, np.inf)
    valid = (t_ground > _EPS) & (t_ground <= range_max)
    best_t = np.where(valid, t_ground, best_t)

    for v in snapshot.vehicles:
        t_box = _ray_box(origin, dirs, v)
        closer = (t_box > _EPS) & (t_box <= range_max) & (t_box < best_t)
        best_t = np.where(closer, t_box, best_t)
        best_label = np.where(closer, v.id, best_label)

    for c in snapshot.walker.capsules:
        t_cap = _ray_capsule(origin, dirs, c.a, c.b, c.radius)
        closer = (t_cap > _EPS) & (t_cap <= range_max) & (t_cap < best_t)
        best_t = np.where(closer, t_cap, best_t)
        best_label = np.where(closer, snapshot.walker.id, best_label)

    best_label = np.where(np.isinf(best_t), GROUND_LABEL, best_label)
    return best_t, best_label


def _ray_box(origin: np.ndarray, dirs: np.ndarray, v: VehicleState) -> np.ndarray:
    """Slab test against a vehicle's oriented box. Returns t, inf for miss."""
    rot = _rotation_matrix(v.transform)
    center = np.array(
        [v.transform.position.x, v.transform.position.y, v.transform.position.z]
    ) + rot @ np.array([0.0, 0.0, v.dims.height / 2.0])
    half = np.array([v.dims.length / 2.0, v.dims.width / 2.0, v.dims.height / 2.0])

    o = (origin - center) @ rot  # rot^T applied to rows
    d = dirs @ rot

    with np.errstate(divide="ignore", invalid="ignore"):
        inv = np.where(np.abs(d) > _EPS, 1.0 / d, np.inf)
    t1 = (-half - o) * inv
    t2 = (half - o) * inv
    tmin = np.minimum(t1, t2)
    tmax = np.maximum(t1, t2)
    # rays parallel to an axis miss unless the origin lies inside that slab
    parallel = np.abs(d) <= _EPS
    inside_slab = np.abs(o) <= half
    tmin = np.where(parallel, np.where(inside_slab, -np.inf, np.inf), tmin)
    tmax = np.where(parallel, np.where(inside_slab, np.inf, -np.inf), tmax)

    t_near = np.max(tmin, axis=1)
    t_far = np.min(tmax, axis=1)
    hit = (t_far >= np.maximum(t_near, 0.0)) & (t_near <= t_far)
    t = np.where(t_near > _EPS, t_near, t_far)  # origin inside: exit point
    return np.where(hit & (t > _EPS), t, np.inf)


def _ray_capsule(
    origin: np.ndarray, dirs: np.ndarray, a: Vec3, b: Vec3, radius: float
) -> np.ndarray:
    """Analytic ray-capsule intersection. Returns t, inf for miss."""
    pa = np.array([a.x, a.y, a.z])
    pb = np.array([b.x, b.y, b.z])
    axis = pb - pa
    axis_len = np.linalg.norm(axis)
    if axis_len < _EPS:
        return _ray_sphere(origin, dirs, pa, radius)
    u = axis / axis_len

    mo = origin - pa
    d_axial = dirs @ u
    m_axial = mo @ u
    d_perp = dirs - np.outer(d_axial, u)
    m_perp = mo - m_axial * u

    aq = np.einsum("ij,ij->i", d_perp, d_perp)
    bq = 2.0 * (d_perp @ m_perp)
    cq = m_perp @ m_perp - radius * radius

    disc = bq * bq - 4.0 * aq * cq
    with np.errstate(divide="ignore", invalid="ignore"):
        sqrt_disc = np.sqrt(np.maximum(disc, 0.0))
        t_cyl = np.where(aq > _EPS, (-bq - sqrt_disc) / (2.0 * aq), np.inf)
    s = m_axial + t_cyl * d_axial  # axial coordinate of the cylinder hit
    cyl_ok = (disc >= 0.0) & (t_cyl > _EPS) & (s >= 0.0) & (s <= axis_len)
    t_cyl = np.where(cyl_ok, t_cyl, np.inf)

    t_caps = np.minimum(
        _ray_sphere(origin, dirs, pa, radius), _ray_sphere(origin, dirs, pb, radius)
    )
    return np.minimum(t_cyl, t_caps)


def _ray_sphere(origin: np.ndarray, dirs: np.ndarray, center: np.ndarray, radius: float) -> np.ndarray:
    oc = origin - center
    b = dirs @ oc
    c = oc @ oc - radius * radius
    disc = b * b - c
    sqrt_disc = np.sqrt(np.maximum(disc, 0.0))
    t = -b - sqrt_disc
    t_far = -b + sqrt_disc
    t = np.where(t > _EPS, t, t_far)  # origin inside: exit point
    return np.where((disc >= 0.0) & (t > _EPS), t, np.inf)


def lidar_rays(cfg: LidarConfig) -> np.ndarray:
    """Unit ray directions in the sensor frame, channel-major order."""
    lo, hi = math.radians(cfg.fov_deg[0]), math.radians(cfg.fov_deg[1])
    if cfg.channels == 1:
        elevations = np.array([(lo + hi) / 2.0])
    else:
        elevations = lo + (hi - lo) * np.arange(cfg.channels) / (cfg.channels - 1)
    azimuths = 2.0 * np.pi * np.arange(cfg.points_per_channel) / cfg.points_per_channel

    el = np.repeat(elevations, cfg.points_per_channel)
    az = np.tile(azimuths, cfg.channels)
    ce = np.cos(el)
    return np.stack([ce * np.cos(az), ce * np.sin(az), np.sin(el)], axis=1)


def lidar_scan(snapshot: WorldSnapshot, cfg: LidarConfig, mode: Mode = Mode.REPLAY) -> LidarScan:
    """One full revolution against the snapshot geometry."""
    _require_replay(mode)
    vehicle = _vehicle(snapshot, cfg.vehicle_id)
    sensor = vehicle.transform.compose(cfg.mount)
    rot = _rotation_matrix(sensor)
    origin = np.array([sensor.position.x, sensor.position.y, sensor.position.z])

    dirs_sensor = lidar_rays(cfg)
    dirs_world = dirs_sensor @ rot.T

    t, labels = cast_rays(origin, dirs_world, snapshot, cfg.range_max)
    hit = np.isfinite(t)
    ranges = t[hit]
    points = dirs_sensor[hit] * ranges[:, None]
    return LidarScan(points=points, ranges=ranges, labels=labels[hit])


def camera_rays(cfg: DepthCameraConfig) -> np.ndarray:
    """Unit ray directions in the camera frame (x forward, y left, z up),
    row-major from the top-left pixel, one ray through each pixel center."""
    tan_h = math.tan(math.radians(cfg.fov_h_deg) / 2.0)
    tan_v = tan_h * cfg.height / cfg.width
    xs = (np.arange(cfg.width) + 0.5) / cfg.width * 2.0 - 1.0
    ys = (np.arange(cfg.height) + 0.5) / cfg.height * 2.0 - 1.0
    gy, gx = np.meshgrid(ys, xs, indexing="ij")
    dirs = np.stack(
        [np.ones_like(gx), -gx * tan_h, -gy * tan_v], axis=-1
    ).reshape(-1, 3)
    return dirs / np.linalg.norm(dirs, axis=1, keepdims=True)


def depth_render(snapshot: WorldSnapshot, cfg: DepthCameraConfig, mode: Mode = Mode.REPLAY) -> DepthImage:
    """Along-ray distance to the nearest primitive per pixel."""
    _require_replay(mode)
    vehicle = _vehicle(snapshot, cfg.vehicle_id)
    sensor = vehicle.transform.compose(cfg.mount)
    rot = _rotation_matrix(sensor)
    origin = np.array([sensor.position.x, sensor.position.y, sensor.position.z])

    dirs_world = camera_rays(cfg) @ rot.T
    t, _ = cast_rays(origin, dirs_world, snapshot, np.inf)
    return DepthImage(
        width=cfg.width,
        height=cfg.height,
        fov_h_deg=cfg.fov_h_deg,
        depth=t.reshape(cfg.height, cfg.width),
    )


@dataclass(frozen=True)
class VisibilitySummary:
    point_count: int
    bounds_min: tuple[float, float, float] | None
    bounds_max: tuple[float, float, float] | None


def pedestrian_visibility(scan: LidarScan, walker_id: int) -> VisibilitySummary:
    """How much of the walker this scan captured."""
    mask = scan.labels == walker_id
    count = int(np.count_nonzero(mask))
    if count == 0:
        return VisibilitySummary(0, None, None)
    pts = scan.points[mask]
    return VisibilitySummary(
        point_count=count,
        bounds_min=tuple(float(v) for v in pts.min(axis=0)),
        bounds_max=tuple(float(v) for v in pts.max(axis=0)),
    )


@dataclass(frozen=True)
class SensorFrames:
    tick: int
    scans: tuple[tuple[LidarConfig, LidarScan], ...]
    depths: tuple[tuple[DepthCameraConfig, DepthImage], ...]


class SensorSuite:
    """A set of sensor configs captured together against each snapshot."""

    def __init__(
        self,
        lidars: tuple[LidarConfig, ...] = (),
        cameras: tuple[DepthCameraConfig, ...] = (),
        mode: Mode = Mode.REPLAY,
        recorder: TimingRecorder | None = None,
    ):
        _require_replay(mode)
        self.lidars = lidars
        self.cameras = cameras
        self.mode = mode
        self.recorder = recorder

    def capture(self, snapshot: WorldSnapshot) -> SensorFrames:
        scans = []
        for cfg in self.lidars:
            if self.recorder is not None:
                self.recorder.note_sensor_op()
            scans.append((cfg, lidar_scan(snapshot, cfg, self.mode)))
        depths = []
        for cfg in self.cameras:
            if self.recorder is not None:
                self.recorder.note_sensor_op()
            depths.append((cfg, depth_render(snapshot, cfg, self.mode)))
        return SensorFrames(tick=snapshot.tick, scans=tuple(scans), depths=tuple(depths))


def scan_to_text(scan: LidarScan) -> str:
    """One point per line: x y z range label (label empty for ground)."""
    lines = []
    for p, r, label in zip(scan.points, scan.ranges, scan.labels):
        tag = "" if label == GROUND_LABEL else str(int(label))
        lines.append(f"{p[0]:.9f} {p[1]:.9f} {p[2]:.9f} {r:.9f} {tag}".rstrip())
    return "\n".join(lines) + ("\n" if lines else "")


def scan_to_bytes(scan: LidarScan) -> bytes:
    """Compact binary: u32 count, then per point 4 f64 (x y z range) + i32 label."""
    out = [struct.pack("<I", len(scan.ranges))]
    for p, r, label in zip(scan.points, scan.ranges, scan.labels):
        out.append(struct.pack("<4di", p[0], p[1], p[2], r, int(label)))
    return b"".join(out)


def depth_to_pgm(img: DepthImage, range_max: float = 100.0) -> str:
    """ASCII portable greymap; 65535 marks misses, comment notes the scale."""
    scale = range_max / 65534.0
    q = np.where(
        np.isfinite(img.depth),
        np.minimum(np.round(img.depth / scale), 65534).astype(np.int64),
        65535,
    )
    rows = [" ".join(str(v) for v in row) for row in q]
    header = f"P2\n# depth in meters = value * {scale!r}; 65535 = no return\n{img.width} {img.height}\n65535"
    return header + "\n" + "\n".join(rows) + "\n"
