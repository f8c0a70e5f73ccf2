"""Deterministic CadQuery source emission plus a pre-execution lint pass.

Emitted scripts are plain chained-workplane CadQuery: one block per part,
holes cut as separate prisms, two-sided extrusions as a union of a forward
and a backward extrude, parts combined per their boolean operation, and a
single STL export at the end. Output is a pure function of the inputs.
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass

from .errors import UnsupportedFeatureError
from .model import Arc, CadSequence, Circle, Face, Line, Loop, Operation, Part, validate

_COMBINE_METHOD = {
    Operation.NEW_BODY: "union",
    Operation.JOIN: "union",
    Operation.CUT: "cut",
    Operation.INTERSECT: "intersect",
}

ARC_COLINEAR_TOL = 1e-9


@dataclass(frozen=True)
class CodeEmission:
    source: str
    part_count: int
    uses_compat_mode: bool


@dataclass(frozen=True)
class Finding:
    code: str
    message: str
    line: int


def transpile(seq: CadSequence, compat: bool = False, stl_path: str = "result.stl") -> CodeEmission:
    """Emit executable CadQuery source for a validated model.

    compat reproduces the centered-circle convention of the reference
    translations (circle center offsets dropped) and prefers 4-decimal
    literals when they are exact.
    """
    validate(seq)
    fmt = _fmt_compat if compat else _fmt
    out: list[str] = ["import cadquery as cq", ""]
    part_names: list[str] = []
    for pi, part in enumerate(seq.parts, 1):
        name = f"part_{pi}"
        out.extend(_emit_part(part, pi, name, compat, fmt))
        part_names.append(name)
        out.append("")

    out.append("# --- Final Result ---")
    out.append(f"result = {part_names[0]}")
    for pi, part in enumerate(seq.parts[1:], 2):
        method = _COMBINE_METHOD[part.extrusion.operation]
        out.append(f"result = result.{method}(part_{pi})")
    out.append(f"cq.exporters.export(result, {stl_path!r})")
    source = "\n".join(out) + "\n"
    return CodeEmission(source=source, part_count=len(seq.parts), uses_compat_mode=compat)


def _emit_part(part: Part, pi: int, name: str, compat: bool, fmt) -> list[str]:
    title = ""
    if part.description and isinstance(part.description.get("name"), str):
        title = f": {part.description['name']}"
    out = [f"# --- Part {pi}{title} ---"]

    multi_face = len(part.sketch.faces) > 1
    face_names: list[str] = []
    for fi, face in enumerate(part.sketch.faces, 1):
        face_name = f"{name}_face_{fi}" if multi_face else name
        out.extend(_emit_face(face, part, face_name, compat, fmt))
        face_names.append(face_name)
    if multi_face:
        joined = face_names[0] + "".join(f".union({fn})" for fn in face_names[1:])
        out.append(f"{name} = {joined}")

    transform_lines = _emit_transform(part, name, fmt)
    if transform_lines:
        out.append(f"# --- Coordinate System Transformation for Part {pi} ---")
        out.extend(transform_lines)
    return out


def _emit_face(face: Face, part: Part, name: str, compat: bool, fmt) -> list[str]:
    ext = part.extrusion
    scale = ext.sketch_scale
    out: list[str] = []

    def body(var: str, loop: Loop, depth_expr: str) -> None:
        calls = _loop_calls(loop, scale, compat, fmt)
        out.append(f"{var} = (")
        out.append('    cq.Workplane("XY")')
        for call in calls:
            out.append(f"    {call}")
        out.append(f"    .extrude({depth_expr})")
        out.append(")")

    def extruded(var: str, loop: Loop) -> None:
        if ext.depth_towards > 0.0:
            body(var, loop, fmt(ext.depth_towards))
            if ext.depth_opposite > 0.0:
                body(f"{var}_back", loop, f"-{fmt(ext.depth_opposite)}")
                out.append(f"{var} = {var}.union({var}_back)")
        else:
            body(var, loop, f"-{fmt(ext.depth_opposite)}")

    extruded(name, face.outer)
    for hi, hole in enumerate(face.holes, 1):
        hole_name = f"{name}_hole_{hi}"
        extruded(hole_name, hole)
        out.append(f"{name} = {name}.cut({hole_name})")
    return out


def _loop_calls(loop: Loop, scale: float, compat: bool, fmt) -> list[str]:
    if loop.is_circle():
        circle = loop.curves[0]
        assert isinstance(circle, Circle)
        radius = fmt(circle.radius * scale)
        cx, cy = circle.center
        if compat or (cx == 0.0 and cy == 0.0):
            return [f".circle({radius})"]
        return [
            f".pushPoints([({fmt(cx * scale)}, {fmt(cy * scale)})])",
            f".circle({radius})",
        ]
    calls: list[str] = []
    first = loop.curves[0]
    sx, sy = first.start  # type: ignore[union-attr]
    calls.append(f".moveTo({fmt(sx * scale)}, {fmt(sy * scale)})")
    for curve in loop.curves:
        if isinstance(curve, Line):
            calls.append(f".lineTo({fmt(curve.end[0] * scale)}, {fmt(curve.end[1] * scale)})")
        elif isinstance(curve, Arc):
            calls.append(
                ".threePointArc("
                f"({fmt(curve.mid[0] * scale)}, {fmt(curve.mid[1] * scale)}), "
                f"({fmt(curve.end[0] * scale)}, {fmt(curve.end[1] * scale)}))"
            )
        else:
            raise UnsupportedFeatureError("loop", f"unsupported curve {type(curve).__name__}")
    calls.append(".close()")
    return calls


def _emit_transform(part: Part, name: str, fmt) -> list[str]:
    out = []
    axes = ((1, 0, 0), (0, 1, 0), (0, 0, 1))  # rotations apply X, then Y, then Z
    for axis, angle in zip(axes, part.euler_angles):
        if angle != 0.0:
            axis_txt = ", ".join(str(c) for c in axis)
            out.append(f"{name} = {name}.rotate((0, 0, 0), ({axis_txt}), {_fmt_int(angle, fmt)})")
    if any(t != 0.0 for t in part.translation):
        tx, ty, tz = (_fmt_int(t, fmt) for t in part.translation)
        out.append(f"{name} = {name}.translate(({tx}, {ty}, {tz}))")
    return out


def _fmt(x: float) -> str:
    """Shortest decimal that round-trips to the same float."""
    return repr(float(x))


def _fmt_compat(x: float) -> str:
    """4-decimal form when exact (reference-translation style), else shortest."""
    rounded = f"{x:.4f}".rstrip("0")
    if rounded.endswith("."):
        rounded += "0"
    if float(rounded) == x:
        return rounded
    return repr(float(x))


def _fmt_int(x: float, fmt) -> str:
    """Transforms print whole numbers as integers: rotate(..., -90)."""
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return fmt(x)


# ---------------------------------------------------------------------------
# static checks


_SKETCH_METHODS = {"moveTo", "lineTo", "threePointArc", "circle", "pushPoints", "rect", "polyline"}
_WIRE_METHODS = {"lineTo", "threePointArc", "polyline"}


def static_check(source: str) -> list[Finding]:
    """Cheap pre-execution lint for generated CadQuery scripts.

    Flags missing cadquery import, sketch calls without a Workplane, wire
    chains extruded without close(), three-point arcs whose (constant-
    resolvable) points are colinear or coincident, and a missing STL export.
    Returns findings, never raises on bad scripts.
    """
    try:
        tree = ast.parse(source)
    except SyntaxError as exc:
        return [Finding("syntax-error", str(exc), exc.lineno or 0)]
    findings: list[Finding] = []

    if not _imports_cadquery(tree):
        findings.append(Finding("missing-import", "script never imports cadquery", 0))

    env = _const_env(tree)
    calls = [n for n in ast.walk(tree) if isinstance(n, ast.Call)]
    method_calls = [c for c in calls if isinstance(c.func, ast.Attribute)]
    names = {c.func.attr for c in method_calls}

    has_workplane = any(
        (isinstance(c.func, ast.Attribute) and c.func.attr == "Workplane")
        or (isinstance(c.func, ast.Name) and c.func.id == "Workplane")
        for c in calls
    )
    if names & _SKETCH_METHODS and not has_workplane:
        findings.append(
            Finding("no-workplane", "sketch calls without defining a workplane", 0)
        )

    for call in method_calls:
        if call.func.attr == "extrude":
            below = _chain_methods(call.func.value)
            if below & _WIRE_METHODS and "close" not in below:
                findings.append(
                    Finding(
                        "missing-close",
                        "wire chain extruded without close()",
                        call.lineno,
                    )
                )
        elif call.func.attr == "threePointArc":
            finding = _check_arc(call, env)
            if finding is not None:
                findings.append(finding)

    exports = any(c.func.attr == "export" for c in method_calls)
    if not exports:
        findings.append(Finding("no-export", "no STL export call", 0))
    return findings


def _imports_cadquery(tree: ast.Module) -> bool:
    for node in ast.walk(tree):
        if isinstance(node, ast.Import):
            if any(alias.name.split(".")[0] == "cadquery" for alias in node.names):
                return True
        elif isinstance(node, ast.ImportFrom):
            if (node.module or "").split(".")[0] == "cadquery":
                return True
    return False


def _chain_methods(node: ast.AST) -> set[str]:
    out: set[str] = set()
    while isinstance(node, ast.Call) and isinstance(node.func, ast.Attribute):
        out.add(node.func.attr)
        node = node.func.value
    return out


def _const_env(tree: ast.Module) -> dict:
    env: dict = {}
    for node in tree.body:
        if (
            isinstance(node, ast.Assign)
            and len(node.targets) == 1
            and isinstance(node.targets[0], ast.Name)
        ):
            value = _eval_const(node.value, env)
            if value is not None:
                env[node.targets[0].id] = value
    return env


def _eval_const(node: ast.AST, env: dict):
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return float(node.value)
    if isinstance(node, ast.Name):
        value = env.get(node.id)
        return value if isinstance(value, float) else None
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        value = _eval_const(node.operand, env)
        if value is None:
            return None
        return -value if isinstance(node.op, ast.USub) else value
    if isinstance(node, ast.BinOp) and isinstance(node.op, (ast.Add, ast.Sub, ast.Mult, ast.Div)):
        left = _eval_const(node.left, env)
        right = _eval_const(node.right, env)
        if left is None or right is None:
            return None
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        return left / right if right != 0.0 else None
    return None


def _eval_point(node: ast.AST, env: dict):
    if isinstance(node, (ast.Tuple, ast.List)) and len(node.elts) == 2:
        x = _eval_const(node.elts[0], env)
        y = _eval_const(node.elts[1], env)
        if x is not None and y is not None:
            return (x, y)
    return None


def _chain_previous_point(node: ast.AST, env: dict):
    """End point of the call chain immediately below a threePointArc."""
    while isinstance(node, ast.Call) and isinstance(node.func, ast.Attribute):
        method = node.func.attr
        if method in ("lineTo", "moveTo") and len(node.args) == 2:
            x = _eval_const(node.args[0], env)
            y = _eval_const(node.args[1], env)
            return (x, y) if x is not None and y is not None else None
        if method == "threePointArc" and len(node.args) == 2:
            return _eval_point(node.args[1], env)
        node = node.func.value
    return None


def _check_arc(call: ast.Call, env: dict):
    if len(call.args) != 2:
        return None
    mid = _eval_point(call.args[0], env)
    end = _eval_point(call.args[1], env)
    if mid is None or end is None:
        return None
    start = _chain_previous_point(call.func.value, env)  # type: ignore[union-attr]
    points = [p for p in (start, mid, end) if p is not None]
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            if math.dist(points[i], points[j]) <= ARC_COLINEAR_TOL:
                return Finding(
                    "degenerate-arc",
                    "threePointArc with coincident points",
                    call.lineno,
                )
    if start is not None:
        cross = (mid[0] - start[0]) * (end[1] - start[1]) - (mid[1] - start[1]) * (
            end[0] - start[0]
        )
        if abs(cross) <= ARC_COLINEAR_TOL:
            return Finding(
                "degenerate-arc",
                "threePointArc points are (near-)colinear; arc construction "
                "will fail at small scales",
                call.lineno,
            )
    return None
