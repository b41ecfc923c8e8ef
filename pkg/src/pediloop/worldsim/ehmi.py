"""External HMI light strip: a two-state signal on the vehicle front.

The strip turns cyan while the vehicle is committed to yielding (braking
intent) and the interface is enabled for the run; otherwise it is dark.
"""
from __future__ import annotations

from .types import EhmiColor, EhmiState, EventKind, ScenarioEvent, VehicleState


def update_ehmi(
    v: VehicleState, braking_intent: bool, enabled: bool
) -> tuple[EhmiState, list[ScenarioEvent]]:
    """Next strip state plus a transition event exactly when it flips."""
    activated = enabled and braking_intent
    state = EhmiState(activated, EhmiColor.CYAN if activated else EhmiColor.OFF)
    events: list[ScenarioEvent] = []
    if state.activated != v.ehmi.activated:
        events.append(
            ScenarioEvent(EventKind.EHMI_CHANGED, v.id, "on" if activated else "off")
        )
    return state, events
