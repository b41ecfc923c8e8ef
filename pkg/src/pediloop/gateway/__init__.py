"""Server-client boundary: message protocol, session hub, asyncio transports."""
from . import protocol
from .protocol import (
    Ack,
    Error,
    Event,
    Hello,
    Message,
    Pose,
    ScenarioCmd,
    Snapshot,
    Walk,
    decode_message,
    encode_message,
    PROTOCOL_VERSION,
)
from .server import GatewayServer
from .session import Gateway, Session, SessionStatus, SNAPSHOT_QUEUE_LIMIT

__all__ = [
    "Ack",
    "Error",
    "Event",
    "Gateway",
    "GatewayServer",
    "Hello",
    "Message",
    "PROTOCOL_VERSION",
    "Pose",
    "ScenarioCmd",
    "Session",
    "SessionStatus",
    "SNAPSHOT_QUEUE_LIMIT",
    "Snapshot",
    "Walk",
    "decode_message",
    "encode_message",
    "protocol",
]
