"""Session protocol between the world runtime and a rendering client.

Server to client: `hello`, then `frame` messages with strictly
increasing sequence numbers starting at 0, and finally `halt`.  Client
to server: `key` and `bye` (plus an optional `hello` used only to check
the protocol version).  One JSON object per WebSocket text message.

`SessionEngine` is the synchronous state machine behind a connection:
it merges ticks and keys into one ordered event stream, emits exactly
one frame per processed event, and records the merged event log so a
finished session can be replayed headlessly, frame for frame.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import universe
from .errors import ClasslangError, ProtocolError
from .images import measure, scene_to_json
from .values import ObjectValue, render_value

PROTOCOL_VERSION = "1"

# a client more than this many frames behind gets intermediate frames
# dropped (events are never dropped)
MAX_CLIENT_LAG = 60

_CLIENT_TYPES = ("key", "bye", "hello")


def hello_message(scene_width_hint=None) -> dict:
    msg = {"type": "hello", "protocol-version": PROTOCOL_VERSION}
    if scene_width_hint is not None:
        msg["scene-width-hint"] = float(scene_width_hint)
    return msg


def frame_message(seq: int, scene, world_text: str) -> dict:
    return {"type": "frame", "seq": seq, "scene": scene_to_json(scene), "world": world_text}


def halt_message(reason: str) -> dict:
    return {"type": "halt", "reason": reason}


def key_message(key: str) -> dict:
    return {"type": "key", "key": key}


def bye_message() -> dict:
    return {"type": "bye"}


def encode(msg: dict) -> str:
    return json.dumps(msg, separators=(",", ":"))


def decode(text: str) -> dict:
    """Decode one client message; unknown types are protocol errors."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        raise ProtocolError("protocol error: message is not valid JSON") from None
    if not isinstance(data, dict) or "type" not in data:
        raise ProtocolError("protocol error: message must be an object with a type field")
    kind = data["type"]
    if kind not in _CLIENT_TYPES:
        raise ProtocolError(f"protocol error: unknown message type {kind!r}")
    if kind == "key":
        key = data.get("key")
        if not isinstance(key, str) or not key:
            raise ProtocolError("protocol error: key messages need a non-empty key string")
    return data


@dataclass
class SessionEngine:
    """One live session: world state, frame numbering, merged event log."""

    world: ObjectValue
    table: object
    interp: object
    seq: int = 0
    halted: bool = False
    started: bool = False
    event_log: list[universe.Event] = field(default_factory=list)
    frames: list[dict] = field(default_factory=list)  # frame messages, for replay checks

    def start(self) -> list[dict]:
        """Handshake: hello plus the initial frame (seq 0)."""
        self.started = True
        try:
            scene = universe.draw(self.world, self.table, self.interp)
        except ClasslangError as exc:
            return [hello_message()] + self._halt(exc.message)
        width, _ = measure(scene)
        out = [hello_message(scene_width_hint=width), self._frame(scene)]
        out.extend(self._check_stop())
        return out

    def handle_event(self, event: universe.Event) -> list[dict]:
        """Process one tick or key event; emits exactly one frame."""
        if self.halted:
            return []
        try:
            self.world = universe.step(self.world, event, self.table, self.interp)
            scene = universe.draw(self.world, self.table, self.interp)
        except ClasslangError as exc:
            return self._halt(exc.message)
        self.event_log.append(event)
        out = [self._frame(scene)]
        out.extend(self._check_stop())
        return out

    def handle_client_text(self, text: str) -> list[dict]:
        """Decode and act on one client message."""
        if self.halted:
            return []
        try:
            data = decode(text)
        except ProtocolError as exc:
            return self._halt(exc.message)
        if data["type"] == "bye":
            return self._halt("stopped")
        if data["type"] == "hello":
            if data.get("protocol-version") != PROTOCOL_VERSION:
                return self._halt("protocol version mismatch")
            return []
        return self.handle_event(universe.Event(universe.EVENT_KEY, data["key"]))

    def tick(self) -> list[dict]:
        return self.handle_event(universe.TICK)

    def recorded_trace(self) -> universe.EventTrace:
        return universe.EventTrace(tuple(self.event_log))

    def _frame(self, scene) -> dict:
        msg = frame_message(self.seq, scene, render_value(self.world))
        self.seq += 1
        self.frames.append(msg)
        return msg

    def _check_stop(self) -> list[dict]:
        try:
            if universe.stop_requested(self.world, self.table, self.interp):
                return self._halt("stopped")
        except ClasslangError as exc:
            return self._halt(exc.message)
        return []

    def _halt(self, reason: str) -> list[dict]:
        if self.halted:
            return []
        self.halted = True
        return [halt_message(reason)]


def coalesce_backlog(pending: list[dict]) -> list[dict]:
    """Apply the lag policy to queued outbound messages: when more than
    MAX_CLIENT_LAG frames are waiting, keep only the newest frame (other
    message kinds are always kept, in order)."""
    frame_count = sum(1 for m in pending if m.get("type") == "frame")
    if frame_count <= MAX_CLIENT_LAG:
        return pending
    last_frame = max(i for i, m in enumerate(pending) if m.get("type") == "frame")
    return [m for i, m in enumerate(pending)
            if m.get("type") != "frame" or i == last_frame]
