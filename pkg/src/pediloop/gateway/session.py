"""Session state machine and the gateway hub.

The hub is transport-agnostic: connections feed decoded messages in via
handle_message and drain per-session outgoing queues; the tick loop pulls
one coalesced walker input per tick and pushes every snapshot to all active
sessions. At most one pedestrian session exists at a time; later pedestrian
Hellos are rejected until the current one disconnects.
"""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field

from ..worldsim.types import PlayArea, PoseInput, WalkIntent, WorldSnapshot
from . import protocol as proto

SNAPSHOT_QUEUE_LIMIT = 64  # per session; freshness beats completeness


class SessionStatus(enum.Enum):
    AWAITING_HELLO = "awaiting_hello"
    ACTIVE = "active"
    CLOSED = "closed"


@dataclass
class Session:
    id: int
    status: SessionStatus = SessionStatus.AWAITING_HELLO
    role: str | None = None
    name: str = ""
    last_input_time: float = 0.0
    outgoing: deque = field(default_factory=deque)
    dropped_snapshots: int = 0

    def queue(self, message: proto.Message) -> None:
        if isinstance(message, proto.Snapshot):
            backlog = sum(1 for m in self.outgoing if isinstance(m, proto.Snapshot))
            if backlog >= SNAPSHOT_QUEUE_LIMIT:
                for i, m in enumerate(self.outgoing):
                    if isinstance(m, proto.Snapshot):
                        del self.outgoing[i]
                        self.dropped_snapshots += 1
                        break
        self.outgoing.append(message)

    def pop_outgoing(self) -> list[proto.Message]:
        out = list(self.outgoing)
        self.outgoing.clear()
        return out


class Gateway:
    """Connection hub between transports and the tick thread."""

    def __init__(self, avatar_id: int, map_digest: str, dt_ms: int, play_area: PlayArea):
        self.avatar_id = avatar_id
        self.map_digest = map_digest
        self.dt_ms = dt_ms
        self.play_area = play_area
        self.sessions: dict[int, Session] = {}
        self._next_sid = 1
        self._pedestrian_sid: int | None = None
        self._pending_input: PoseInput | WalkIntent | None = None
        self._pending_cmds: list[proto.ScenarioCmd] = []
        self._last_pose_time: float = -1.0

    # -- connection lifecycle -------------------------------------------------

    def connect(self) -> int:
        sid = self._next_sid
        self._next_sid += 1
        self.sessions[sid] = Session(id=sid)
        return sid

    def disconnect(self, sid: int) -> None:
        session = self.sessions.get(sid)
        if session is None:
            return
        session.status = SessionStatus.CLOSED
        if self._pedestrian_sid == sid:
            self._pedestrian_sid = None
            self._last_pose_time = -1.0
        del self.sessions[sid]

    @property
    def pedestrian_sid(self) -> int | None:
        return self._pedestrian_sid

    # -- inbound --------------------------------------------------------------

    def handle_message(self, sid: int, msg: proto.Message) -> None:
        """Apply one decoded client message; replies land on the session queue."""
        session = self.sessions.get(sid)
        if session is None or session.status is SessionStatus.CLOSED:
            return

        if isinstance(msg, proto.Hello):
            self._handle_hello(session, msg)
            return

        if session.status is not SessionStatus.ACTIVE:
            session.queue(proto.Error("protocol", "hello required before any other message"))
            return

        if isinstance(msg, (proto.Pose, proto.Walk, proto.ScenarioCmd)):
            if session.role != proto.ROLE_PEDESTRIAN:
                session.queue(proto.Error("not_authorized", "spectators cannot send inputs"))
                return
            if isinstance(msg, proto.Pose):
                if msg.pose.timestamp < self._last_pose_time:
                    return  # stale sample from a reordered feed; drop
                self._last_pose_time = msg.pose.timestamp
                session.last_input_time = msg.pose.timestamp
                self._pending_input = msg.pose
            elif isinstance(msg, proto.Walk):
                self._pending_input = msg.intent
            else:
                self._pending_cmds.append(msg)
            return

        session.queue(proto.Error("protocol", f"unexpected {type(msg).__name__} from client"))

    def _handle_hello(self, session: Session, msg: proto.Hello) -> None:
        if session.status is SessionStatus.ACTIVE:
            session.queue(proto.Error("protocol", "session already active"))
            return
        if msg.role == proto.ROLE_PEDESTRIAN:
            if self._pedestrian_sid is not None:
                session.queue(
                    proto.Error("pedestrian_taken", "a pedestrian session is already active")
                )
                return
            self._pedestrian_sid = session.id
            avatar = self.avatar_id
        else:
            avatar = -1
        session.status = SessionStatus.ACTIVE
        session.role = msg.role
        session.name = msg.name
        session.queue(proto.Ack(avatar, self.map_digest, self.dt_ms, self.play_area))

    def handle_raw(self, sid: int, frame: bytes) -> None:
        """Decode and apply one frame; malformed input gets an Error reply and
        the connection stays usable."""
        session = self.sessions.get(sid)
        try:
            msg = proto.decode_message(frame)
        except proto.UnknownTagError as e:
            if session is not None:
                session.queue(proto.Error("unknown_tag", str(e)))
            return
        except proto.DecodeError as e:
            if session is not None:
                session.queue(proto.Error("decode", str(e)))
            return
        self.handle_message(sid, msg)

    # -- tick-side ------------------------------------------------------------

    def drain_input(self) -> PoseInput | WalkIntent | None:
        """Latest walker input since the previous drain (latest-wins)."""
        out = self._pending_input
        self._pending_input = None
        return out

    def drain_commands(self) -> list[proto.ScenarioCmd]:
        out = self._pending_cmds
        self._pending_cmds = []
        return out

    def broadcast_snapshot(self, snapshot: WorldSnapshot) -> None:
        """Queue the snapshot (and its events) for every active session."""
        msg = proto.Snapshot(snapshot)
        events = [proto.Event(e) for e in snapshot.events]
        for session in self.sessions.values():
            if session.status is not SessionStatus.ACTIVE:
                continue
            session.queue(msg)
            for ev in events:
                session.queue(ev)

    def active_sessions(self) -> list[Session]:
        return [s for s in self.sessions.values() if s.status is SessionStatus.ACTIVE]
