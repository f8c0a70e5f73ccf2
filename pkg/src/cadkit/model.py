"""Sketch-extrude model: domain types plus JSON parsing and serialization.

The on-disk form is the minimal nested-JSON structure used by sketch-extrude
datasets: parts keyed "part_1", "part_2", ..., each with a coordinate system
(Euler angles in degrees plus a translation), a sketch of faces/loops/curves,
and one extrusion record.
"""

from __future__ import annotations

import json
import math
import re
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional, Union

from .errors import GeometryError, SchemaError, UnknownKeyWarning

LOOP_CLOSE_TOL = 1e-6

Vec2 = tuple[float, float]
Vec3 = tuple[float, float, float]


class Operation(Enum):
    """Boolean operation applied when a part's extrusion meets the body."""

    NEW_BODY = 0
    JOIN = 1
    CUT = 2
    INTERSECT = 3

    @property
    def json_name(self) -> str:
        return _OP_TO_JSON[self]


_OP_TO_JSON = {
    Operation.NEW_BODY: "NewBodyFeatureOperation",
    Operation.JOIN: "JoinFeatureOperation",
    Operation.CUT: "CutFeatureOperation",
    Operation.INTERSECT: "IntersectFeatureOperation",
}
_JSON_TO_OP = {name: op for op, name in _OP_TO_JSON.items()}
_JSON_TO_OP.update(
    {"NewBody": Operation.NEW_BODY, "Join": Operation.JOIN,
     "Cut": Operation.CUT, "Intersect": Operation.INTERSECT}
)


@dataclass(frozen=True)
class Line:
    start: Vec2
    end: Vec2


@dataclass(frozen=True)
class Arc:
    """Circular arc through three points: start, on-curve mid, end."""

    start: Vec2
    mid: Vec2
    end: Vec2


@dataclass(frozen=True)
class Circle:
    center: Vec2
    radius: float


Curve = Union[Line, Arc, Circle]


@dataclass(frozen=True)
class Loop:
    """Closed chain of curves; a lone circle closes by itself."""

    curves: tuple[Curve, ...]

    def is_circle(self) -> bool:
        return len(self.curves) == 1 and isinstance(self.curves[0], Circle)


@dataclass(frozen=True)
class Face:
    """First loop is the outer boundary; remaining loops are holes."""

    loops: tuple[Loop, ...]

    @property
    def outer(self) -> Loop:
        return self.loops[0]

    @property
    def holes(self) -> tuple[Loop, ...]:
        return self.loops[1:]


@dataclass(frozen=True)
class Sketch:
    faces: tuple[Face, ...]


@dataclass(frozen=True)
class Extrusion:
    depth_towards: float
    depth_opposite: float
    sketch_scale: float
    operation: Operation


@dataclass(frozen=True)
class Part:
    euler_angles: Vec3  # degrees, applied X then Y then Z
    translation: Vec3
    sketch: Sketch
    extrusion: Extrusion
    description: Optional[dict] = None


@dataclass(frozen=True)
class CadSequence:
    parts: tuple[Part, ...]
    final_name: str = ""

    def __len__(self) -> int:
        return len(self.parts)


def iter_curves(seq: CadSequence) -> Iterator[tuple[str, Curve]]:
    """Yield (path, curve) over the whole model, in modeling order."""
    for pi, part in enumerate(seq.parts, 1):
        for fi, face in enumerate(part.sketch.faces, 1):
            for li, loop in enumerate(face.loops, 1):
                for ci, curve in enumerate(loop.curves, 1):
                    path = f"part_{pi}.sketch.face_{fi}.loop_{li}.curve_{ci}"
                    yield path, curve


def command_count(seq: CadSequence) -> int:
    """Flattened command count: one SOL per loop, one per curve, one Extrude per part."""
    total = 0
    for part in seq.parts:
        for face in part.sketch.faces:
            for loop in face.loops:
                total += 1 + len(loop.curves)
        total += 1
    return total


# ---------------------------------------------------------------------------
# parsing


def parse_cad_json(text: str) -> CadSequence:
    """Parse and validate the minimal-JSON model representation.

    Raises json.JSONDecodeError for malformed JSON, SchemaError for missing
    or mistyped fields and GeometryError for open loops or bad radii.
    Unknown keys are ignored with an UnknownKeyWarning.
    """
    doc = json.loads(text)
    return parse_cad_obj(doc)


def parse_cad_obj(doc) -> CadSequence:
    """Validate an already-decoded JSON object tree."""
    if not isinstance(doc, dict):
        raise SchemaError("$", "document must be a JSON object")
    _warn_unknown(doc, {"final_name", "parts"}, "$")
    final_name = doc.get("final_name", "")
    if not isinstance(final_name, str):
        raise SchemaError("final_name", "must be a string")
    if "parts" not in doc:
        raise SchemaError("parts", "missing")
    parts_obj = doc["parts"]
    if not isinstance(parts_obj, dict):
        raise SchemaError("parts", "must be an object")
    if not parts_obj:
        raise SchemaError("parts", "empty")
    part_keys = _dense_keys(parts_obj, "part", "parts")
    parts = tuple(
        _parse_part(parts_obj[key], f"parts.{key}") for key in part_keys
    )
    return CadSequence(parts=parts, final_name=final_name)


def _dense_keys(obj: dict, prefix: str, path: str) -> list[str]:
    pattern = re.compile(rf"^{prefix}_(\d+)$")
    indexed = []
    for key in obj:
        m = pattern.match(key)
        if not m:
            raise SchemaError(f"{path}.{key}", f"expected {prefix}_<n> keys")
        indexed.append((int(m.group(1)), key))
    indexed.sort()
    for pos, (idx, key) in enumerate(indexed, start=1):
        if idx != pos:
            raise SchemaError(f"{path}.{key}", f"{prefix} keys must be dense and 1-based")
    return [key for _, key in indexed]


def _parse_part(obj, path: str) -> Part:
    if not isinstance(obj, dict):
        raise SchemaError(path, "must be an object")
    _warn_unknown(obj, {"coordinate_system", "sketch", "extrusion", "description"}, path)
    for key in ("coordinate_system", "sketch", "extrusion"):
        if key not in obj:
            raise SchemaError(f"{path}.{key}", "missing")
    cs = obj["coordinate_system"]
    if not isinstance(cs, dict):
        raise SchemaError(f"{path}.coordinate_system", "must be an object")
    _warn_unknown(cs, {"Euler Angles", "Translation Vector"}, f"{path}.coordinate_system")
    euler = _parse_vec(cs.get("Euler Angles"), 3, f"{path}.coordinate_system.Euler Angles")
    translation = _parse_vec(
        cs.get("Translation Vector"), 3, f"{path}.coordinate_system.Translation Vector"
    )
    sketch = _parse_sketch(obj["sketch"], f"{path}.sketch")
    extrusion = _parse_extrusion(obj["extrusion"], f"{path}.extrusion")
    description = obj.get("description")
    if description is not None and not isinstance(description, dict):
        raise SchemaError(f"{path}.description", "must be an object")
    return Part(
        euler_angles=euler,
        translation=translation,
        sketch=sketch,
        extrusion=extrusion,
        description=description,
    )


def _parse_sketch(obj, path: str) -> Sketch:
    if not isinstance(obj, dict):
        raise SchemaError(path, "must be an object")
    if not obj:
        raise SchemaError(path, "empty")
    face_keys = _ordered_keys(obj, "face", path)
    faces = tuple(_parse_face(obj[key], f"{path}.{key}") for key in face_keys)
    return Sketch(faces=faces)


def _parse_face(obj, path: str) -> Face:
    if not isinstance(obj, dict):
        raise SchemaError(path, "must be an object")
    if not obj:
        raise SchemaError(path, "empty")
    loop_keys = _ordered_keys(obj, "loop", path)
    loops = tuple(_parse_loop(obj[key], f"{path}.{key}") for key in loop_keys)
    return Face(loops=loops)


def _ordered_keys(obj: dict, prefix: str, path: str) -> list[str]:
    pattern = re.compile(rf"^{prefix}_(\d+)$")
    indexed = []
    for key in obj:
        m = pattern.match(key)
        if not m:
            warnings.warn(f"{path}.{key}: unknown key ignored", UnknownKeyWarning)
            continue
        indexed.append((int(m.group(1)), key))
    if not indexed:
        raise SchemaError(path, f"no {prefix}_<n> entries")
    indexed.sort()
    return [key for _, key in indexed]


_CURVE_KEY = re.compile(r"^(line|arc|circle)_(\d+)$")


def _parse_loop(obj, path: str) -> Loop:
    if not isinstance(obj, dict):
        raise SchemaError(path, "must be an object")
    curves: list[Curve] = []
    for key, rec in obj.items():  # insertion order is modeling order
        m = _CURVE_KEY.match(key)
        if not m:
            warnings.warn(f"{path}.{key}: unknown key ignored", UnknownKeyWarning)
            continue
        kind = m.group(1)
        cpath = f"{path}.{key}"
        if not isinstance(rec, dict):
            raise SchemaError(cpath, "must be an object")
        if kind == "line":
            _warn_unknown(rec, {"Start Point", "End Point"}, cpath)
            curves.append(
                Line(
                    start=_parse_vec(rec.get("Start Point"), 2, f"{cpath}.Start Point"),
                    end=_parse_vec(rec.get("End Point"), 2, f"{cpath}.End Point"),
                )
            )
        elif kind == "arc":
            _warn_unknown(rec, {"Start Point", "Mid Point", "End Point"}, cpath)
            curves.append(
                Arc(
                    start=_parse_vec(rec.get("Start Point"), 2, f"{cpath}.Start Point"),
                    mid=_parse_vec(rec.get("Mid Point"), 2, f"{cpath}.Mid Point"),
                    end=_parse_vec(rec.get("End Point"), 2, f"{cpath}.End Point"),
                )
            )
        else:
            _warn_unknown(rec, {"Center", "Radius"}, cpath)
            radius = _parse_scalar(rec.get("Radius"), f"{cpath}.Radius")
            if radius <= 0.0:
                raise GeometryError(cpath, "circle radius must be positive")
            curves.append(
                Circle(center=_parse_vec(rec.get("Center"), 2, f"{cpath}.Center"), radius=radius)
            )
    if not curves:
        raise SchemaError(path, "loop has no curves")
    loop = Loop(curves=tuple(curves))
    _validate_loop(loop, path)
    return loop


def _validate_loop(loop: Loop, path: str) -> None:
    circles = [c for c in loop.curves if isinstance(c, Circle)]
    if circles:
        if len(loop.curves) > 1:
            raise GeometryError(path, "a circle must be the only curve in its loop")
        return
    chain = loop.curves
    for i, curve in enumerate(chain):
        prev = chain[i - 1]  # wraps: first curve closes against the last
        gap = math.dist(prev.end, curve.start)  # type: ignore[union-attr]
        if gap > LOOP_CLOSE_TOL:
            what = "not closed" if i == 0 else "not connected head-to-tail"
            raise GeometryError(f"{path}.curve_{i + 1}", f"loop {what} (gap {gap:.3g})")


def _parse_extrusion(obj, path: str) -> Extrusion:
    if not isinstance(obj, dict):
        raise SchemaError(path, "must be an object")
    known = {
        "extrude_depth_towards_normal",
        "extrude_depth_opposite_normal",
        "sketch_scale",
        "operation",
    }
    _warn_unknown(obj, known, path)
    for key in known:
        if key not in obj:
            raise SchemaError(f"{path}.{key}", "missing")
    towards = _parse_scalar(obj["extrude_depth_towards_normal"], f"{path}.extrude_depth_towards_normal")
    opposite = _parse_scalar(obj["extrude_depth_opposite_normal"], f"{path}.extrude_depth_opposite_normal")
    scale = _parse_scalar(obj["sketch_scale"], f"{path}.sketch_scale")
    op_name = obj["operation"]
    if not isinstance(op_name, str) or op_name not in _JSON_TO_OP:
        raise SchemaError(f"{path}.operation", f"unknown operation {op_name!r}")
    if towards < 0.0 or opposite < 0.0:
        raise GeometryError(path, "extrusion depths must be non-negative")
    if towards + opposite <= 0.0:
        raise GeometryError(path, "extrusion depth must be positive on at least one side")
    if scale <= 0.0:
        raise GeometryError(path, "sketch_scale must be positive")
    return Extrusion(
        depth_towards=towards,
        depth_opposite=opposite,
        sketch_scale=scale,
        operation=_JSON_TO_OP[op_name],
    )


def _parse_vec(value, n: int, path: str) -> tuple:
    if not isinstance(value, (list, tuple)):
        raise SchemaError(path, f"must be a {n}-element array")
    if len(value) != n:
        raise SchemaError(path, f"expected {n} elements, got {len(value)}")
    return tuple(_parse_scalar(v, f"{path}[{i}]") for i, v in enumerate(value))


def _parse_scalar(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(path, "must be a number")
    v = float(value)
    if not math.isfinite(v):
        raise SchemaError(path, "must be finite")
    return v


def _warn_unknown(obj: dict, known: set, path: str) -> None:
    for key in obj:
        if key not in known:
            warnings.warn(f"{path}.{key}: unknown key ignored", UnknownKeyWarning)


# ---------------------------------------------------------------------------
# serialization


def serialize_cad_json(seq: CadSequence, indent: int = 2) -> str:
    """Canonical JSON text: parse(serialize(s)) structurally equals s.

    Key order is fixed (coordinate_system, sketch, extrusion, description);
    floats use Python's shortest round-trip representation.
    """
    doc: dict = {}
    if seq.final_name:
        doc["final_name"] = seq.final_name
    parts: dict = {}
    for pi, part in enumerate(seq.parts, 1):
        parts[f"part_{pi}"] = _part_to_obj(part)
    doc["parts"] = parts
    return json.dumps(doc, indent=indent)


def _part_to_obj(part: Part) -> dict:
    obj = {
        "coordinate_system": {
            "Euler Angles": list(part.euler_angles),
            "Translation Vector": list(part.translation),
        },
        "sketch": _sketch_to_obj(part.sketch),
        "extrusion": {
            "extrude_depth_towards_normal": part.extrusion.depth_towards,
            "extrude_depth_opposite_normal": part.extrusion.depth_opposite,
            "sketch_scale": part.extrusion.sketch_scale,
            "operation": part.extrusion.operation.json_name,
        },
    }
    if part.description is not None:
        obj["description"] = part.description
    return obj


def _sketch_to_obj(sketch: Sketch) -> dict:
    out: dict = {}
    for fi, face in enumerate(sketch.faces, 1):
        face_obj: dict = {}
        for li, loop in enumerate(face.loops, 1):
            loop_obj: dict = {}
            counters = {"line": 0, "arc": 0, "circle": 0}
            for curve in loop.curves:
                if isinstance(curve, Line):
                    counters["line"] += 1
                    loop_obj[f"line_{counters['line']}"] = {
                        "Start Point": list(curve.start),
                        "End Point": list(curve.end),
                    }
                elif isinstance(curve, Arc):
                    counters["arc"] += 1
                    loop_obj[f"arc_{counters['arc']}"] = {
                        "Start Point": list(curve.start),
                        "Mid Point": list(curve.mid),
                        "End Point": list(curve.end),
                    }
                else:
                    counters["circle"] += 1
                    loop_obj[f"circle_{counters['circle']}"] = {
                        "Center": list(curve.center),
                        "Radius": curve.radius,
                    }
            face_obj[f"loop_{li}"] = loop_obj
        out[f"face_{fi}"] = face_obj
    return out


def validate(seq: CadSequence) -> None:
    """Re-check all model invariants on an in-memory sequence."""
    parse_cad_obj(json.loads(serialize_cad_json(seq)))
