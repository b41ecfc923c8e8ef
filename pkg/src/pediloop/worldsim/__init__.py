"""Fixed-timestep world simulation: actors, scenario, eHMI, audio, collision."""
from .config import WorldConfig, apply_scenario_overrides, load_world_config
from .scenario import CrossingScenario
from .types import (
    AudioLevel,
    BehaviorFlags,
    Capsule,
    EhmiColor,
    EhmiState,
    EventKind,
    PlayArea,
    PoseInput,
    ScenarioConfig,
    ScenarioEvent,
    ScenarioPhase,
    VehicleDims,
    VehicleState,
    WalkerState,
    WalkIntent,
    WorldSnapshot,
    YieldPolicy,
)
from .vehicle import (
    DEFAULT_MODEL,
    VehicleModel,
    apply_vehicle_control,
    brake_command_for_decel,
    cruise_throttle,
    integrate_vehicle,
)
from .world import WALKER_ID, World, step_world

__all__ = [
    "AudioLevel",
    "BehaviorFlags",
    "Capsule",
    "CrossingScenario",
    "DEFAULT_MODEL",
    "EhmiColor",
    "EhmiState",
    "EventKind",
    "PlayArea",
    "PoseInput",
    "ScenarioConfig",
    "ScenarioEvent",
    "ScenarioPhase",
    "VehicleDims",
    "VehicleModel",
    "VehicleState",
    "WALKER_ID",
    "WalkIntent",
    "WalkerState",
    "World",
    "WorldConfig",
    "WorldSnapshot",
    "YieldPolicy",
    "apply_scenario_overrides",
    "apply_vehicle_control",
    "brake_command_for_decel",
    "cruise_throttle",
    "integrate_vehicle",
    "load_world_config",
    "step_world",
]
