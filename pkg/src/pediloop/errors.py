"""Exception hierarchy. Every failure the harness can report is a typed
subclass of PediloopError so callers (and the CLI exit-code mapping) can
distinguish configuration, data-integrity and protocol/runtime problems."""
from __future__ import annotations


class PediloopError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(PediloopError):
    """Bad or inconsistent configuration (wrong dt, missing file, bad value)."""


class SessionError(PediloopError):
    """Input referred to an actor or session that does not exist."""


class PoseFormatError(PediloopError):
    """Pose input payload malformed (e.g. wrong joint count)."""


class ControlError(PediloopError):
    """Non-finite vehicle control input."""


class ScenarioSetupError(PediloopError):
    """Scenario preconditions not met by the loaded map."""


class MapParseError(PediloopError):
    """OpenDRIVE document malformed."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        if line is not None:
            message = f"{message} (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(message)
        self.line = line
        self.column = column


class UnsupportedGeometryError(MapParseError):
    """Plan-view geometry kind outside the supported {line, arc} subset."""

    def __init__(self, kind: str, road_id: str):
        super().__init__(f"unsupported plan-view geometry '{kind}' on road {road_id}")
        self.kind = kind
        self.road_id = road_id


class MapDomainError(PediloopError):
    """Arclength query outside a road's domain."""


class BvhParseError(PediloopError):
    """BVH document malformed."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"{message} (line {line})"
        super().__init__(message)
        self.line = line


class RetargetError(PediloopError):
    """Clip cannot be mapped onto the avatar skeleton."""


class SequenceError(PediloopError):
    """Recording append out of tick order."""


class MergeError(PediloopError):
    """Motion track incompatible with the recording."""


class RecordingFormatError(PediloopError):
    """Recording file structurally invalid or of an unsupported version."""


class CorruptionError(PediloopError):
    """Recording content does not match its integrity digest."""


class ModeViolationError(PediloopError):
    """Sensor work attempted during a live (sensor-free) run."""


class ProtocolError(PediloopError):
    """Message violates the session protocol state machine."""


class DecodeError(PediloopError):
    """Frame could not be decoded into a message."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (offset {offset})"
        super().__init__(message)
        self.offset = offset


class UnknownTagError(DecodeError):
    """Well-formed frame with an unrecognized message tag."""

    def __init__(self, tag: str):
        super().__init__(f"unknown message tag '{tag}'")
        self.tag = tag


class ResponseValidationError(PediloopError):
    """Questionnaire response outside the expected shape or range."""


class DegenerateDataError(PediloopError):
    """Reliability statistic undefined for this data (zero total variance)."""
