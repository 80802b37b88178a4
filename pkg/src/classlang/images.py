"""Structural image values (scene graphs) with SVG and JSON serialization.

A scene is built from `empty-scene`, `circle` and `place-image`, exactly
the constructors world programs use.  `place-image` centers its image at
(x, y) with the origin at the scene's top-left corner and y growing
downward; out-of-bounds coordinates are kept and only clipped by the SVG
viewport at render time.  Equality is structural, not visual.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from . import numeric
from .errors import EvalError

MODES = ("solid", "outline")

# classic 16-color palette
COLORS = frozenset({
    "white", "silver", "gray", "black", "red", "maroon", "yellow", "olive",
    "lime", "green", "aqua", "teal", "blue", "navy", "fuchsia", "purple",
})


@dataclass(frozen=True)
class EmptyScene:
    width: Fraction | int | float
    height: Fraction | int | float


@dataclass(frozen=True)
class Circle:
    radius: Fraction | int | float
    mode: str
    color: str


@dataclass(frozen=True)
class PlaceImage:
    image: "Scene"
    x: Fraction | int | float
    y: Fraction | int | float
    scene: "Scene"


Scene = Union[EmptyScene, Circle, PlaceImage]


def is_scene(v: object) -> bool:
    return isinstance(v, (EmptyScene, Circle, PlaceImage))


def is_scene_rooted(v: object) -> bool:
    return isinstance(v, (EmptyScene, PlaceImage))


def circle(radius, mode, color) -> Circle:
    if not numeric.is_number(radius) or radius <= 0:
        raise EvalError(f"circle: expected a positive radius, given {radius!r}")
    if mode not in MODES:
        raise EvalError(f'circle: mode must be "solid" or "outline", given {mode!r}')
    if not isinstance(color, str) or color not in COLORS:
        raise EvalError(f"circle: unknown color {color!r}")
    return Circle(radius, mode, color)


def empty_scene(width, height) -> EmptyScene:
    for dim, name in ((width, "width"), (height, "height")):
        if not numeric.is_number(dim) or dim < 0:
            raise EvalError(f"empty-scene: expected a non-negative {name}, given {dim!r}")
    return EmptyScene(width, height)


def place_image(image, x, y, scene) -> PlaceImage:
    if not is_scene(image):
        raise EvalError("place-image: expected an image as the first argument")
    for coord, name in ((x, "x"), (y, "y")):
        if not numeric.is_number(coord):
            raise EvalError(f"place-image: expected a number for {name}, given {coord!r}")
    if not is_scene_rooted(scene):
        raise EvalError("place-image: expected a scene as the fourth argument")
    return PlaceImage(image, x, y, scene)


def measure(s: Scene):
    """Bounding width/height of a scene value used for centering."""
    if isinstance(s, EmptyScene):
        return s.width, s.height
    if isinstance(s, Circle):
        return 2 * s.radius, 2 * s.radius
    return measure(s.scene)


# ---------------------------------------------------------------------------
# SVG rendering

def _svg_num(v) -> str:
    # exact values become decimals with at most 6 fractional digits
    text = f"{float(v):.6f}".rstrip("0").rstrip(".")
    return "0" if text in ("", "-0") else text


def render_svg(s: Scene) -> str:
    if not is_scene_rooted(s):
        raise EvalError("render: expected a scene (empty-scene or place-image at the root)")
    width, height = measure(s)
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_svg_num(width)}"'
        f' height="{_svg_num(height)}" viewBox="0 0 {_svg_num(width)} {_svg_num(height)}">'
    ]
    _emit_scene(s, lines)
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def _emit_scene(s: Scene, lines: list[str]) -> None:
    # innermost scene first: backgrounds below, later placements on top
    if isinstance(s, EmptyScene):
        lines.append(
            f'<rect x="0" y="0" width="{_svg_num(s.width)}" height="{_svg_num(s.height)}"'
            ' fill="white" stroke="none"/>')
        return
    _emit_scene(s.scene, lines)
    _emit_image(s.image, s.x, s.y, lines)


def _emit_image(img: Scene, cx, cy, lines: list[str]) -> None:
    if isinstance(img, Circle):
        paint = ('fill="%s" stroke="none"' % img.color if img.mode == "solid"
                 else 'fill="none" stroke="%s" stroke-width="1"' % img.color)
        lines.append(f'<circle cx="{_svg_num(cx)}" cy="{_svg_num(cy)}"'
                     f' r="{_svg_num(img.radius)}" {paint}/>')
        return
    width, height = measure(img)
    tx = cx - width / 2
    ty = cy - height / 2
    if isinstance(img, EmptyScene):
        lines.append(
            f'<rect x="{_svg_num(tx)}" y="{_svg_num(ty)}" width="{_svg_num(width)}"'
            f' height="{_svg_num(height)}" fill="white" stroke="none"/>')
        return
    lines.append(f'<g transform="translate({_svg_num(tx)} {_svg_num(ty)})">')
    _emit_scene(img, lines)
    lines.append("</g>")


# ---------------------------------------------------------------------------
# JSON serialization (the wire and snapshot format)

def _json_num(v) -> int | float:
    # numbers coerce to doubles; integral values print without the .0 so
    # the output matches what a JSON.stringify-style writer would emit
    f = float(v)
    return int(f) if f.is_integer() else f


def scene_to_json(s: Scene) -> dict:
    if isinstance(s, EmptyScene):
        return {"type": "empty-scene", "width": _json_num(s.width), "height": _json_num(s.height)}
    if isinstance(s, Circle):
        return {"type": "circle", "radius": _json_num(s.radius), "mode": s.mode, "color": s.color}
    if isinstance(s, PlaceImage):
        return {"type": "place-image", "image": scene_to_json(s.image),
                "x": _json_num(s.x), "y": _json_num(s.y), "scene": scene_to_json(s.scene)}
    raise EvalError(f"not a scene: {s!r}")


def scene_from_json(data) -> Scene:
    if not isinstance(data, dict) or "type" not in data:
        raise ValueError("scene JSON must be an object with a type field")
    kind = data["type"]
    if kind == "empty-scene":
        return empty_scene(data["width"], data["height"])
    if kind == "circle":
        return circle(data["radius"], data["mode"], data["color"])
    if kind == "place-image":
        return place_image(scene_from_json(data["image"]), data["x"], data["y"],
                           scene_from_json(data["scene"]))
    raise ValueError(f"unknown scene node type {kind!r}")


def canonical_scene_json(s: Scene) -> str:
    """Byte-stable serialization used for frames.jsonl and replay checks."""
    return json.dumps(scene_to_json(s), separators=(",", ":"))


def render_scene_text(s: Scene) -> str:
    """Source-syntax rendering, used when printing scene values."""
    if isinstance(s, EmptyScene):
        return (f"(empty-scene {numeric.render_number(s.width)}"
                f" {numeric.render_number(s.height)})")
    if isinstance(s, Circle):
        return f'(circle {numeric.render_number(s.radius)} "{s.mode}" "{s.color}")'
    return (f"(place-image {render_scene_text(s.image)} {numeric.render_number(s.x)}"
            f" {numeric.render_number(s.y)} {render_scene_text(s.scene)})")
