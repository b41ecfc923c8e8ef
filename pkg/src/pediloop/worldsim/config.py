"""World/scenario configuration files.

INI format, parsed with configparser. Schema (all keys required unless a
default is noted):

    [simulation]
    dt_ms = 55                      ; integer milliseconds per tick
    map = university_crossing.xodr  ; path, relative to this file

    [play_area]
    tracking_min = 0.0, 0.0         ; tracking-space rect corner (m)
    tracking_size = 4.0, 4.0
    world_anchor = 47.0, -7.0       ; world-space rect corner (m)
    world_yaw_deg = 0.0
    world_size = 9.0, 14.0

    [walker]
    spawn = 51.5, -5.5
    heading_deg = 90.0

    [scenario]
    vehicle_spawn_s = 5.0           ; arclength along the road (m)
    target_speed = 8.33             ; m/s
    yield_policy = yield            ; yield | ignore
    decel = 6.0                     ; m/s^2 braking aggressiveness
    ehmi_enabled = true
    stop_margin = 0.5               ; m short of the crosswalk edge

    [vehicle_model]                 ; optional section, defaults shown
    a_max = 3.5
    b_max = 8.0
    c_roll = 0.1
    wheelbase = 2.7
    max_steer_deg = 35.0
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from ..errors import ConfigError
from ..geom import OrientedRect2, Rect2
from .types import PlayArea, ScenarioConfig, YieldPolicy
from .vehicle import VehicleModel


@dataclass(frozen=True)
class WorldConfig:
    dt_ms: int
    map_path: Path
    play_area: PlayArea
    walker_spawn: tuple[float, float]
    walker_heading: float  # rad
    scenario: ScenarioConfig
    model: VehicleModel = field(default_factory=VehicleModel)

    def __post_init__(self) -> None:
        if self.dt_ms <= 0:
            raise ConfigError(f"dt_ms must be a positive integer, got {self.dt_ms}")

    @property
    def dt(self) -> float:
        return self.dt_ms / 1000.0


def _pair(raw: str, context: str) -> tuple[float, float]:
    parts = [p.strip() for p in raw.split(",")]
    if len(parts) != 2:
        raise ConfigError(f"{context}: expected 'x, y', got {raw!r}")
    try:
        return (float(parts[0]), float(parts[1]))
    except ValueError as e:
        raise ConfigError(f"{context}: not numeric: {raw!r}") from e


def load_world_config(path: str | Path) -> WorldConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        parser.read_string(path.read_text(encoding="utf-8"), source=str(path))
    except configparser.Error as e:
        raise ConfigError(f"cannot parse {path}: {e}") from e

    try:
        sim = parser["simulation"]
        dt_ms = sim.getint("dt_ms")
        map_path = (path.parent / sim.get("map")).resolve()

        pa = parser["play_area"]
        tmin = _pair(pa.get("tracking_min"), "play_area.tracking_min")
        tsize = _pair(pa.get("tracking_size"), "play_area.tracking_size")
        wanchor = _pair(pa.get("world_anchor"), "play_area.world_anchor")
        wsize = _pair(pa.get("world_size"), "play_area.world_size")
        play_area = PlayArea(
            tracking_rect=Rect2(tmin[0], tmin[1], tsize[0], tsize[1]),
            world_rect=OrientedRect2(
                wanchor[0],
                wanchor[1],
                math.radians(pa.getfloat("world_yaw_deg")),
                wsize[0],
                wsize[1],
            ),
        )

        wk = parser["walker"]
        spawn = _pair(wk.get("spawn"), "walker.spawn")
        heading = math.radians(wk.getfloat("heading_deg"))

        sc = parser["scenario"]
        policy_raw = sc.get("yield_policy").strip().lower()
        try:
            policy = YieldPolicy(policy_raw)
        except ValueError:
            raise ConfigError(f"scenario.yield_policy must be 'yield' or 'ignore', got {policy_raw!r}")
        scenario = ScenarioConfig(
            vehicle_spawn_s=sc.getfloat("vehicle_spawn_s"),
            target_speed=sc.getfloat("target_speed"),
            yield_policy=policy,
            decel=sc.getfloat("decel"),
            ehmi_enabled=sc.getboolean("ehmi_enabled"),
            stop_margin=sc.getfloat("stop_margin"),
        )

        model = VehicleModel()
        if parser.has_section("vehicle_model"):
            vm = parser["vehicle_model"]
            model = VehicleModel(
                a_max=vm.getfloat("a_max", fallback=model.a_max),
                b_max=vm.getfloat("b_max", fallback=model.b_max),
                c_roll=vm.getfloat("c_roll", fallback=model.c_roll),
                wheelbase=vm.getfloat("wheelbase", fallback=model.wheelbase),
                max_steer=math.radians(vm.getfloat("max_steer_deg", fallback=math.degrees(model.max_steer))),
            )
    except ConfigError:
        raise
    except (KeyError, configparser.NoOptionError, TypeError, ValueError) as e:
        raise ConfigError(f"bad config {path}: {e}") from e

    return WorldConfig(
        dt_ms=dt_ms,
        map_path=map_path,
        play_area=play_area,
        walker_spawn=spawn,
        walker_heading=heading,
        scenario=scenario,
        model=model,
    )


def apply_scenario_overrides(config: WorldConfig, overrides: dict) -> WorldConfig:
    """Apply ScenarioCmd-style overrides (string keys matching ScenarioConfig)."""
    if not overrides:
        return config
    allowed = {"vehicle_spawn_s", "target_speed", "yield_policy", "decel", "ehmi_enabled", "stop_margin"}
    clean: dict = {}
    for key, value in overrides.items():
        if key not in allowed:
            raise ConfigError(f"unknown scenario override {key!r}")
        if key == "yield_policy":
            value = YieldPolicy(str(value).lower())
        clean[key] = value
    return replace(config, scenario=config.scenario.with_overrides(**clean))
