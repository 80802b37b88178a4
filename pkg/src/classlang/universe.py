"""Object-oriented big-bang event loop, headless edition.

A world is an immutable object; each tick or key event sends `on-tick`
or `on-key` and the result becomes the next world.  A world without a
handler ignores that event, which is what keeps a landed rocket inert.
`to-draw` is mandatory and is consulted after every event to produce
one frame per event plus the initial frame.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from . import objects
from .errors import ClasslangError, EvalError, UsageError
from .images import Scene, canonical_scene_json, is_scene, render_svg
from .values import ObjectValue, render_value

EVENT_TICK = "tick"
EVENT_KEY = "key"


@dataclass(frozen=True)
class Event:
    kind: str  # tick | key
    key: str | None = None

    def __post_init__(self):
        if self.kind not in (EVENT_TICK, EVENT_KEY):
            raise ValueError(f"unknown event kind {self.kind!r}")
        if self.kind == EVENT_KEY and not self.key:
            raise ValueError("key events need a non-empty key name")

    def to_json(self) -> dict:
        if self.kind == EVENT_TICK:
            return {"type": "tick"}
        return {"type": "key", "key": self.key}


TICK = Event(EVENT_TICK)


@dataclass(frozen=True)
class EventTrace:
    events: tuple[Event, ...]
    max_frames: int | None = None


@dataclass(frozen=True)
class Frame:
    index: int
    scene: Scene
    world_text: str


@dataclass
class FrameLog:
    frames: list[Frame] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.frames)


def event_from_json(data, line_no: int | None = None) -> Event:
    where = f" (line {line_no})" if line_no else ""
    if not isinstance(data, dict) or "type" not in data:
        raise UsageError(f"trace events must be objects with a type field{where}")
    kind = data["type"]
    if kind == "tick":
        return TICK
    if kind == "key":
        key = data.get("key")
        if not isinstance(key, str) or not key:
            raise UsageError(f"key events need a non-empty key string{where}")
        return Event(EVENT_KEY, key)
    if kind == "mouse":
        raise UsageError(f"mouse events unsupported{where}")
    raise UsageError(f"unknown event type {kind!r}{where}")


def parse_trace_jsonl(text: str, max_frames: int | None = None) -> EventTrace:
    events = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            data = json.loads(line)
        except json.JSONDecodeError as exc:
            raise UsageError(f"trace line {line_no} is not valid JSON: {exc.msg}") from None
        events.append(event_from_json(data, line_no))
    return EventTrace(tuple(events), max_frames)


def step(world: ObjectValue, event: Event, table: objects.ClassTable, interp) -> ObjectValue:
    """Process one event; worlds without the relevant handler are returned
    unchanged."""
    if not isinstance(world, ObjectValue):
        raise EvalError(f"big-bang: the world must be an object, given {render_value(world)}")
    handler = "on-tick" if event.kind == EVENT_TICK else "on-key"
    if not table.has_method(world.class_name, handler):
        return world
    args = [] if event.kind == EVENT_TICK else [event.key]
    result = objects.dispatch(table, world, handler, args, interp)
    if not isinstance(result, ObjectValue):
        raise EvalError(f"handler must return a world: {handler} of class"
                        f" {world.class_name} returned {render_value(result)}")
    return result


def draw(world: ObjectValue, table: objects.ClassTable, interp) -> Scene:
    if not table.has_method(world.class_name, "to-draw"):
        raise EvalError(f"big-bang: world of class {world.class_name} does not provide"
                        " a to-draw method")
    scene = objects.dispatch(table, world, "to-draw", [], interp)
    if not is_scene(scene):
        raise EvalError(f"to-draw of class {world.class_name} must return an image,"
                        f" returned {render_value(scene)}")
    return scene


def stop_requested(world: ObjectValue, table: objects.ClassTable, interp) -> bool:
    """True when the world defines stop-when and it answers true."""
    if not table.has_method(world.class_name, "stop-when"):
        return False
    result = objects.dispatch(table, world, "stop-when", [], interp)
    if not isinstance(result, bool):
        raise EvalError(f"stop-when of class {world.class_name} must return true or"
                        f" false, returned {render_value(result)}")
    return result


def run_headless(initial: ObjectValue, trace: EventTrace, table: objects.ClassTable,
                 interp) -> tuple[ObjectValue, FrameLog]:
    """Fold the trace over the world, drawing after every event.  Stops
    only at trace end (or the frame cap); errors carry the step index."""
    log = FrameLog()
    world = initial

    def cap_reached() -> bool:
        return trace.max_frames is not None and len(log) >= trace.max_frames

    if not cap_reached():
        log.frames.append(Frame(0, draw(world, table, interp), render_value(world)))
    for index, event in enumerate(trace.events, start=1):
        if cap_reached():
            break
        try:
            world = step(world, event, table, interp)
            scene = draw(world, table, interp)
        except ClasslangError as exc:
            raise EvalError(f"step {index}: {exc.message}", exc.line, exc.col) from None
        log.frames.append(Frame(index, scene, render_value(world)))
    return world, log


def write_frame_export(log: FrameLog, out_dir: str | Path) -> None:
    """Write frame-%04d.svg files plus frames.jsonl of scene JSON."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lines = []
    for frame in log.frames:
        (out / f"frame-{frame.index:04d}.svg").write_text(render_svg(frame.scene))
        lines.append(canonical_scene_json(frame.scene))
    (out / "frames.jsonl").write_text("".join(line + "\n" for line in lines))
