"""Restricted OpenDRIVE (.xodr) road network parser.

Supported subset: plan-view line and arc segments, lane sections with cubic
lane-width records, and road objects of type "crosswalk". Anything outside
the subset fails loudly: spiral/poly3/paramPoly3 geometries raise
UnsupportedGeometryError, malformed XML raises MapParseError with the
position. Elevation is ignored; the world is flat at z=0.

Crosswalk objects: the s/t attributes are the object center on the road,
`length` its extent along s and `width` its extent across the road (full
road width when absent). An <outline> of <cornerRoad s t> points, when
present, overrides that rectangle.
"""
from __future__ import annotations

import hashlib
import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from .errors import MapDomainError, MapParseError, ScenarioSetupError, UnsupportedGeometryError

_S_TOL = 1e-6


@dataclass(frozen=True)
class PlanSegment:
    s0: float
    x: float
    y: float
    hdg: float
    length: float
    curvature: float = 0.0  # 0 for lines, signed 1/m for arcs

    @property
    def is_arc(self) -> bool:
        return self.curvature != 0.0


@dataclass(frozen=True)
class LaneWidth:
    s_offset: float  # relative to the lane section start
    a: float
    b: float
    c: float
    d: float

    def eval(self, ds: float) -> float:
        return self.a + self.b * ds + self.c * ds * ds + self.d * ds * ds * ds


@dataclass(frozen=True)
class Lane:
    id: int
    type: str
    widths: tuple[LaneWidth, ...]


@dataclass(frozen=True)
class LaneSection:
    s0: float
    left: tuple[Lane, ...]  # ascending positive ids
    right: tuple[Lane, ...]  # descending negative ids (-1 first)


@dataclass(frozen=True)
class Road:
    id: str
    name: str
    length: float
    segments: tuple[PlanSegment, ...]
    sections: tuple[LaneSection, ...]


@dataclass(frozen=True)
class Crosswalk:
    road_id: str
    s_start: float
    s_end: float
    polygon: tuple[tuple[float, float], ...]  # world xy, counter-clockwise


@dataclass(frozen=True)
class MapModel:
    roads: dict[str, Road] = field(default_factory=dict)
    crosswalks: tuple[Crosswalk, ...] = ()
    digest: str = ""  # sha256 of the source document

    def single_crosswalk(self) -> Crosswalk:
        if len(self.crosswalks) != 1:
            raise ScenarioSetupError(
                f"scenario needs exactly one crosswalk, map has {len(self.crosswalks)}"
            )
        return self.crosswalks[0]


def parse_opendrive(document: str) -> MapModel:
    """Parse an OpenDRIVE document into a MapModel, or fail with one typed error."""
    try:
        root = ET.fromstring(document)
    except ET.ParseError as e:
        line, col = getattr(e, "position", (None, None))
        raise MapParseError(f"malformed OpenDRIVE XML: {e.msg if hasattr(e, 'msg') else e}", line, col) from e

    if root.tag != "OpenDRIVE":
        raise MapParseError(f"root element is <{root.tag}>, expected <OpenDRIVE>")

    roads: dict[str, Road] = {}
    crosswalks: list[Crosswalk] = []
    for road_el in root.findall("road"):
        road = _parse_road(road_el)
        roads[road.id] = road
        for obj_el in road_el.findall("objects/object"):
            if (obj_el.get("type") or "").lower() == "crosswalk":
                crosswalks.append(_parse_crosswalk(obj_el, road))

    digest = hashlib.sha256(document.encode("utf-8")).hexdigest()
    return MapModel(roads=roads, crosswalks=tuple(crosswalks), digest=digest)


def _attr_float(el: ET.Element, name: str, context: str) -> float:
    raw = el.get(name)
    if raw is None:
        raise MapParseError(f"{context}: missing attribute '{name}'")
    try:
        return float(raw)
    except ValueError as e:
        raise MapParseError(f"{context}: attribute '{name}' is not a number: {raw!r}") from e


def _parse_road(road_el: ET.Element) -> Road:
    road_id = road_el.get("id") or "?"
    context = f"road {road_id}"
    length = _attr_float(road_el, "length", context)

    segments: list[PlanSegment] = []
    for geo_el in road_el.findall("planView/geometry"):
        kind_el = None
        for child in geo_el:
            kind_el = child
            break
        if kind_el is None:
            raise MapParseError(f"{context}: <geometry> without a shape child")
        kind = kind_el.tag
        if kind == "line":
            curvature = 0.0
        elif kind == "arc":
            curvature = _attr_float(kind_el, "curvature", context)
            if curvature == 0.0:
                raise MapParseError(f"{context}: arc with zero curvature")
        else:
            raise UnsupportedGeometryError(kind, road_id)
        segments.append(
            PlanSegment(
                s0=_attr_float(geo_el, "s", context),
                x=_attr_float(geo_el, "x", context),
                y=_attr_float(geo_el, "y", context),
                hdg=_attr_float(geo_el, "hdg", context),
                length=_attr_float(geo_el, "length", context),
                curvature=curvature,
            )
        )
    if not segments:
        raise MapParseError(f"{context}: no plan-view geometry")
    segments.sort(key=lambda g: g.s0)
    for a, b in zip(segments, segments[1:]):
        if abs(a.s0 + a.length - b.s0) > _S_TOL:
            raise MapParseError(
                f"{context}: plan-view gap between s={a.s0 + a.length} and s={b.s0}"
            )

    sections: list[LaneSection] = []
    for sec_el in road_el.findall("lanes/laneSection"):
        s0 = _attr_float(sec_el, "s", context)
        left = _parse_lanes(sec_el.find("left"), context)
        right = _parse_lanes(sec_el.find("right"), context)
        left.sort(key=lambda l: l.id)
        right.sort(key=lambda l: -l.id)
        sections.append(LaneSection(s0=s0, left=tuple(left), right=tuple(right)))
    if not sections:
        raise MapParseError(f"{context}: no lane sections")
    sections.sort(key=lambda s: s.s0)

    return Road(
        id=road_id,
        name=road_el.get("name") or "",
        length=length,
        segments=tuple(segments),
        sections=tuple(sections),
    )


def _parse_lanes(side_el: ET.Element | None, context: str) -> list[Lane]:
    lanes: list[Lane] = []
    if side_el is None:
        return lanes
    for lane_el in side_el.findall("lane"):
        lane_id_raw = lane_el.get("id")
        try:
            lane_id = int(lane_id_raw)  # type: ignore[arg-type]
        except (TypeError, ValueError):
            raise MapParseError(f"{context}: lane id {lane_id_raw!r} is not an integer")
        widths = tuple(
            LaneWidth(
                s_offset=_attr_float(w, "sOffset", context),
                a=_attr_float(w, "a", context),
                b=_attr_float(w, "b", context),
                c=_attr_float(w, "c", context),
                d=_attr_float(w, "d", context),
            )
            for w in lane_el.findall("width")
        )
        if not widths:
            raise MapParseError(f"{context}: lane {lane_id} has no width record")
        lanes.append(Lane(id=lane_id, type=lane_el.get("type") or "none", widths=widths))
    return lanes


def _parse_crosswalk(obj_el: ET.Element, road: Road) -> Crosswalk:
    context = f"road {road.id} crosswalk object {obj_el.get('id') or '?'}"
    s_center = _attr_float(obj_el, "s", context)
    t_center = float(obj_el.get("t") or 0.0)
    length = float(obj_el.get("length") or 0.0)
    if length <= 0.0:
        raise MapParseError(f"{context}: crosswalk needs a positive length")
    s_start = s_center - length / 2.0
    s_end = s_center + length / 2.0

    corners = obj_el.findall("outline/cornerRoad")
    if corners:
        pts = [
            point_on_road(road, _attr_float(c, "s", context), _attr_float(c, "t", context))
            for c in corners
        ]
        if len(pts) < 3:
            raise MapParseError(f"{context}: outline needs at least 3 corners")
    else:
        width = obj_el.get("width")
        if width is not None:
            half = float(width) / 2.0
            t_lo, t_hi = t_center - half, t_center + half
        else:
            left_w, right_w = side_widths(road, s_center)
            t_lo, t_hi = -right_w, left_w
        pts = [
            point_on_road(road, s_start, t_lo),
            point_on_road(road, s_end, t_lo),
            point_on_road(road, s_end, t_hi),
            point_on_road(road, s_start, t_hi),
        ]

    if _signed_area(pts) < 0.0:
        pts.reverse()
    if abs(_signed_area(pts)) <= 0.0:
        raise MapParseError(f"{context}: crosswalk polygon has zero area")
    return Crosswalk(road_id=road.id, s_start=s_start, s_end=s_end, polygon=tuple(pts))


def _signed_area(pts: list[tuple[float, float]]) -> float:
    area = 0.0
    n = len(pts)
    for i in range(n):
        x1, y1 = pts[i]
        x2, y2 = pts[(i + 1) % n]
        area += x1 * y2 - x2 * y1
    return area / 2.0


def sample_reference_line(road: Road, s: float) -> tuple[tuple[float, float], float]:
    """Point and heading of the road reference line at arclength s."""
    if s < -_S_TOL or s > road.length + _S_TOL:
        raise MapDomainError(f"s={s} outside road {road.id} domain [0, {road.length}]")
    s = min(max(s, 0.0), road.length)

    seg = road.segments[0]
    for candidate in road.segments:
        if candidate.s0 <= s + _S_TOL:
            seg = candidate
        else:
            break
    ds = s - seg.s0

    if not seg.is_arc:
        x = seg.x + ds * math.cos(seg.hdg)
        y = seg.y + ds * math.sin(seg.hdg)
        return (x, y), seg.hdg

    k = seg.curvature
    h = seg.hdg + k * ds
    x = seg.x + (math.sin(h) - math.sin(seg.hdg)) / k
    y = seg.y - (math.cos(h) - math.cos(seg.hdg)) / k
    return (x, y), h


def point_on_road(road: Road, s: float, t: float) -> tuple[float, float]:
    """World point at (s, t): t is the lateral offset, positive to the left."""
    (x, y), h = sample_reference_line(road, s)
    return (x - t * math.sin(h), y + t * math.cos(h))


def _section_at(road: Road, s: float) -> tuple[LaneSection, float]:
    section = road.sections[0]
    for candidate in road.sections:
        if candidate.s0 <= s + _S_TOL:
            section = candidate
        else:
            break
    return section, s - section.s0


def _lane_width_at(lane: Lane, ds_section: float) -> float:
    rec = lane.widths[0]
    for candidate in lane.widths:
        if candidate.s_offset <= ds_section + _S_TOL:
            rec = candidate
        else:
            break
    return max(0.0, rec.eval(ds_section - rec.s_offset))


def side_widths(road: Road, s: float) -> tuple[float, float]:
    """Total (left, right) paved width at arclength s."""
    section, ds = _section_at(road, s)
    left = sum(_lane_width_at(l, ds) for l in section.left)
    right = sum(_lane_width_at(l, ds) for l in section.right)
    return (left, right)


def lane_center_offset(road: Road, s: float, lane_id: int) -> float:
    """Lateral offset t of a lane's centerline at arclength s."""
    if lane_id == 0:
        return 0.0
    section, ds = _section_at(road, s)
    lanes = section.left if lane_id > 0 else section.right
    offset = 0.0
    for lane in lanes:
        w = _lane_width_at(lane, ds)
        if lane.id == lane_id:
            offset += w / 2.0
            return offset if lane_id > 0 else -offset
        offset += w
    raise MapDomainError(f"road {road.id} has no lane {lane_id} at s={s}")


def project_to_road(road: Road, x: float, y: float) -> float:
    """Arclength of the reference-line point nearest to (x, y)."""
    best_s = 0.0
    best_d = math.inf
    for seg in road.segments:
        if not seg.is_arc:
            dx, dy = x - seg.x, y - seg.y
            ds = dx * math.cos(seg.hdg) + dy * math.sin(seg.hdg)
            ds = min(max(ds, 0.0), seg.length)
        else:
            k = seg.curvature
            r = 1.0 / k
            cx = seg.x - r * math.sin(seg.hdg)
            cy = seg.y + r * math.cos(seg.hdg)
            a0 = math.atan2(seg.y - cy, seg.x - cx)
            a1 = math.atan2(y - cy, x - cx)
            delta = a1 - a0
            while delta > math.pi:
                delta -= 2.0 * math.pi
            while delta < -math.pi:
                delta += 2.0 * math.pi
            ds = delta * r  # r carries the curvature sign
            ds = min(max(ds, 0.0), seg.length)
        (px, py), _ = sample_reference_line(road, seg.s0 + ds)
        d = math.hypot(x - px, y - py)
        if d < best_d:
            best_d = d
            best_s = seg.s0 + ds
    return best_s


def point_in_polygon(polygon: tuple[tuple[float, float], ...], x: float, y: float) -> bool:
    """Winding-number point-in-polygon test; boundary points count as inside."""
    wn = 0
    n = len(polygon)
    for i in range(n):
        x1, y1 = polygon[i]
        x2, y2 = polygon[(i + 1) % n]
        if _on_segment(x1, y1, x2, y2, x, y):
            return True
        if y1 <= y:
            if y2 > y and _is_left(x1, y1, x2, y2, x, y) > 0.0:
                wn += 1
        else:
            if y2 <= y and _is_left(x1, y1, x2, y2, x, y) < 0.0:
                wn -= 1
    return wn != 0


def _is_left(x1: float, y1: float, x2: float, y2: float, x: float, y: float) -> float:
    return (x2 - x1) * (y - y1) - (x - x1) * (y2 - y1)


def _on_segment(x1: float, y1: float, x2: float, y2: float, x: float, y: float, eps: float = 1e-12) -> bool:
    cross = _is_left(x1, y1, x2, y2, x, y)
    if abs(cross) > eps * max(1.0, abs(x2 - x1) + abs(y2 - y1)):
        return False
    dot = (x - x1) * (x2 - x1) + (y - y1) * (y2 - y1)
    sq_len = (x2 - x1) ** 2 + (y2 - y1) ** 2
    return -eps <= dot <= sq_len + eps


def point_in_crosswalk(map_model: MapModel, x: float, y: float) -> bool:
    return any(point_in_polygon(cw.polygon, x, y) for cw in map_model.crosswalks)


def map_geometry_jsonable(map_model: MapModel, step: float = 1.0) -> dict:
    """Drawable geometry for clients: sampled centerline and paved edges per
    road, plus crosswalk polygons."""
    roads = []
    for road in map_model.roads.values():
        center: list[tuple[float, float]] = []
        left: list[tuple[float, float]] = []
        right: list[tuple[float, float]] = []
        n = max(1, int(math.ceil(road.length / step)))
        for i in range(n + 1):
            s = min(road.length, i * step)
            (x, y), h = sample_reference_line(road, s)
            lw, rw = side_widths(road, s)
            center.append((x, y))
            left.append((x - lw * math.sin(h), y + lw * math.cos(h)))
            right.append((x + rw * math.sin(h), y - rw * math.cos(h)))
        roads.append(
            {
                "id": road.id,
                "name": road.name,
                "centerline": [[px, py] for px, py in center],
                "left_edge": [[px, py] for px, py in left],
                "right_edge": [[px, py] for px, py in right],
            }
        )
    return {
        "roads": roads,
        "crosswalks": [
            {"road_id": cw.road_id, "polygon": [[px, py] for px, py in cw.polygon]}
            for cw in map_model.crosswalks
        ],
    }
