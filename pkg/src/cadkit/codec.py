"""Fixed-length quantized command-vector codec for sketch-extrude models.

A model flattens to at most 60 commands drawn from six types (Line, Arc,
Circle, SOL, Extrude, EOS). Each command carries 16 integer parameters in
[-1, 255]; -1 marks a slot the command type does not use. Scalars in [0, 1]
are quantized to 256 bins (8-bit); Euler angles are first mapped from
degrees to [0, 1] via (deg + 180) / 360.

Parameter slot layout (LAYOUT_VERSION 1):
  0-4   curve geometry: x, y, x_mid, y_mid, radius
  5-15  extrusion: theta, phi, gamma, px, py, pz, scale, d+, d-, bool, extent
"""

from __future__ import annotations

import math
import struct
import warnings
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from . import geom2d
from .errors import ClampWarning, QuantizeError, StructureError, TruncationError
from .model import (
    Arc,
    CadSequence,
    Circle,
    Extrusion,
    Face,
    Line,
    Loop,
    Operation,
    Part,
    Sketch,
    command_count,
    validate,
)

SEQUENCE_LENGTH = 60
N_PARAMS = 16
N_BINS = 256
PARAM_CLASSES = N_BINS + 1  # one extra "unused" bin
LAYOUT_VERSION = 1
MAGIC = b"CSQ1"

# extrusion parameter slots
SLOT_THETA, SLOT_PHI, SLOT_GAMMA = 5, 6, 7
SLOT_PX, SLOT_PY, SLOT_PZ = 8, 9, 10
SLOT_SCALE, SLOT_DPLUS, SLOT_DMINUS = 11, 12, 13
SLOT_BOOL, SLOT_EXTENT = 14, 15


class CommandType(IntEnum):
    LINE = 0
    ARC = 1
    CIRCLE = 2
    SOL = 3
    EXTRUDE = 4
    EOS = 5


def quantize(value: float) -> int:
    """Map a scalar in [0, 1] to a bin in [0, 255]; ties round half up."""
    if math.isnan(value):
        raise QuantizeError("cannot quantize NaN")
    v = min(1.0, max(0.0, value))
    return int(math.floor(v * (N_BINS - 1) + 0.5))


def dequantize(bin_index: int) -> float:
    if not 0 <= bin_index <= N_BINS - 1:
        raise QuantizeError(f"bin {bin_index} outside [0, {N_BINS - 1}]")
    return bin_index / (N_BINS - 1)


def _quantize_checked(value: float, what: str) -> int:
    if math.isnan(value):
        raise QuantizeError(f"cannot quantize NaN ({what})")
    if value < 0.0 or value > 1.0:
        warnings.warn(f"{what}={value!r} outside [0, 1], clamped", ClampWarning)
    return quantize(value)


def _angle_to_unit(deg: float, what: str) -> float:
    if deg < -180.0 or deg > 180.0:
        warnings.warn(f"{what}={deg!r} outside [-180, 180], clamped", ClampWarning)
        deg = min(180.0, max(-180.0, deg))
    return (deg + 180.0) / 360.0


def _unit_to_angle(v: float) -> float:
    return v * 360.0 - 180.0


@dataclass(frozen=True)
class CommandVector:
    """60 quantized commands: type codes plus 16 parameter bins each."""

    types: np.ndarray  # (60,) uint8
    params: np.ndarray  # (60, 16) int16

    def __post_init__(self):
        self.types.setflags(write=False)
        self.params.setflags(write=False)

    @property
    def command_count(self) -> int:
        """Index of the first EOS entry (== count of meaningful commands)."""
        eos = np.flatnonzero(self.types == CommandType.EOS)
        return int(eos[0]) if len(eos) else SEQUENCE_LENGTH

    def entries(self):
        """Yield (position_index, CommandType, params-row) triples."""
        for i in range(SEQUENCE_LENGTH):
            yield i, CommandType(int(self.types[i])), self.params[i]

    def to_one_hot(self) -> np.ndarray:
        """(60, 6 + 16*257) one-hot expansion; bin -1 maps to the last class."""
        out = np.zeros((SEQUENCE_LENGTH, 6 + N_PARAMS * PARAM_CLASSES), dtype=np.uint8)
        out[np.arange(SEQUENCE_LENGTH), self.types] = 1
        cls = np.where(self.params < 0, N_BINS, self.params)
        cols = 6 + np.arange(N_PARAMS) * PARAM_CLASSES + cls
        out[np.arange(SEQUENCE_LENGTH)[:, None], cols] = 1
        return out

    def to_bytes(self) -> bytes:
        buf = bytearray()
        buf += MAGIC
        buf += struct.pack("<BB", LAYOUT_VERSION, SEQUENCE_LENGTH)
        for i in range(SEQUENCE_LENGTH):
            buf += struct.pack("<B16h", int(self.types[i]), *map(int, self.params[i]))
        return bytes(buf)

    @classmethod
    def from_bytes(cls, data: bytes) -> "CommandVector":
        if data[:4] != MAGIC:
            raise StructureError("bad magic; not a command-vector file")
        version, length = struct.unpack_from("<BB", data, 4)
        if version != LAYOUT_VERSION:
            raise StructureError(f"unsupported layout version {version}")
        if length != SEQUENCE_LENGTH:
            raise StructureError(f"unsupported sequence length {length}")
        record = struct.Struct("<B16h")
        expected = 6 + record.size * SEQUENCE_LENGTH
        if len(data) != expected:
            raise StructureError(f"expected {expected} bytes, got {len(data)}")
        types = np.empty(SEQUENCE_LENGTH, dtype=np.uint8)
        params = np.empty((SEQUENCE_LENGTH, N_PARAMS), dtype=np.int16)
        for i in range(SEQUENCE_LENGTH):
            row = record.unpack_from(data, 6 + i * record.size)
            if row[0] > CommandType.EOS:
                raise StructureError(f"record {i}: unknown command type {row[0]}")
            types[i] = row[0]
            params[i] = row[1:]
        vec = cls(types=types, params=params)
        check_vector(vec)
        return vec


# which parameter slots each command type uses
_USED_SLOTS = {
    CommandType.LINE: (0, 1),
    CommandType.ARC: (0, 1, 2, 3),
    CommandType.CIRCLE: (0, 1, 4),
    CommandType.SOL: (),
    CommandType.EXTRUDE: tuple(range(5, 16)),
    CommandType.EOS: (),
}


def check_vector(vec: CommandVector) -> None:
    """Enforce CommandVector invariants (padding, ranges, unused slots)."""
    if vec.types.shape != (SEQUENCE_LENGTH,) or vec.params.shape != (SEQUENCE_LENGTH, N_PARAMS):
        raise StructureError("wrong array shapes")
    if vec.params.min() < -1 or vec.params.max() > N_BINS - 1:
        raise StructureError("parameter bin outside [-1, 255]")
    seen_eos = False
    for i, ctype, params in vec.entries():
        if seen_eos and ctype != CommandType.EOS:
            raise StructureError(f"record {i}: command after EOS")
        if ctype == CommandType.EOS:
            seen_eos = True
        used = _USED_SLOTS[ctype]
        for slot in range(N_PARAMS):
            if slot in used:
                if params[slot] < 0:
                    raise StructureError(f"record {i}: slot {slot} unset for {ctype.name}")
            elif params[slot] != -1:
                raise StructureError(f"record {i}: slot {slot} must be -1 for {ctype.name}")


# ---------------------------------------------------------------------------
# encoding


def encode_sequence(seq: CadSequence, allow_truncation: bool = False) -> CommandVector:
    """Flatten and quantize a validated model into a fixed-length vector."""
    validate(seq)
    total = command_count(seq)
    if total > SEQUENCE_LENGTH and not allow_truncation:
        raise TruncationError(total, SEQUENCE_LENGTH)

    types = np.full(SEQUENCE_LENGTH, CommandType.EOS, dtype=np.uint8)
    params = np.full((SEQUENCE_LENGTH, N_PARAMS), -1, dtype=np.int16)
    rows: list[tuple[int, list[tuple[int, int]]]] = []

    for pi, part in enumerate(seq.parts, 1):
        for face in part.sketch.faces:
            for loop in face.loops:
                rows.append((CommandType.SOL, []))
                for curve in loop.curves:
                    rows.append(_encode_curve(curve, f"part_{pi}"))
        rows.append(_encode_extrusion(part, f"part_{pi}"))

    for i, (ctype, slot_values) in enumerate(rows[:SEQUENCE_LENGTH]):
        types[i] = ctype
        for slot, bin_index in slot_values:
            params[i, slot] = bin_index
    return CommandVector(types=types, params=params)


def _encode_curve(curve, where: str):
    if isinstance(curve, Line):
        return (
            CommandType.LINE,
            [
                (0, _quantize_checked(curve.end[0], f"{where} line end x")),
                (1, _quantize_checked(curve.end[1], f"{where} line end y")),
            ],
        )
    if isinstance(curve, Arc):
        return (
            CommandType.ARC,
            [
                (0, _quantize_checked(curve.end[0], f"{where} arc end x")),
                (1, _quantize_checked(curve.end[1], f"{where} arc end y")),
                (2, _quantize_checked(curve.mid[0], f"{where} arc mid x")),
                (3, _quantize_checked(curve.mid[1], f"{where} arc mid y")),
            ],
        )
    return (
        CommandType.CIRCLE,
        [
            (0, _quantize_checked(curve.center[0], f"{where} circle x")),
            (1, _quantize_checked(curve.center[1], f"{where} circle y")),
            (4, _quantize_checked(curve.radius, f"{where} circle radius")),
        ],
    )


def _encode_extrusion(part: Part, where: str):
    ext = part.extrusion
    a1, a2, a3 = part.euler_angles
    tx, ty, tz = part.translation
    values = [
        (SLOT_THETA, quantize(_angle_to_unit(a1, f"{where} euler x"))),
        (SLOT_PHI, quantize(_angle_to_unit(a2, f"{where} euler y"))),
        (SLOT_GAMMA, quantize(_angle_to_unit(a3, f"{where} euler z"))),
        (SLOT_PX, _quantize_checked(tx, f"{where} translation x")),
        (SLOT_PY, _quantize_checked(ty, f"{where} translation y")),
        (SLOT_PZ, _quantize_checked(tz, f"{where} translation z")),
        (SLOT_SCALE, _quantize_checked(ext.sketch_scale, f"{where} sketch_scale")),
        (SLOT_DPLUS, _quantize_checked(ext.depth_towards, f"{where} depth towards")),
        (SLOT_DMINUS, _quantize_checked(ext.depth_opposite, f"{where} depth opposite")),
        (SLOT_BOOL, ext.operation.value),
        (SLOT_EXTENT, 0),
    ]
    return (CommandType.EXTRUDE, values)


# ---------------------------------------------------------------------------
# decoding


def decode_sequence(vec: CommandVector) -> CadSequence:
    """Rebuild a model from a command vector; entries after the first EOS
    are ignored. Curve start points are reconstructed from the previous
    curve's end point (loops close cyclically); loops regroup into faces by
    containment in the current face's outer boundary.
    """
    parts: list[Part] = []
    loops: list[Loop] = []
    current: list[tuple] = []  # raw curve specs of the open loop
    in_loop = False

    def close_loop(pos: int):
        nonlocal current, in_loop
        if not in_loop:
            return
        if not current:
            raise StructureError(f"record {pos}: start-of-loop with no curves")
        loops.append(_build_loop(current, pos))
        current = []

    for pos, ctype, p in vec.entries():
        if ctype == CommandType.EOS:
            break
        if ctype == CommandType.SOL:
            close_loop(pos)
            in_loop = True
        elif ctype in (CommandType.LINE, CommandType.ARC, CommandType.CIRCLE):
            if not in_loop:
                raise StructureError(f"record {pos}: curve before start-of-loop")
            current.append(_decode_curve(ctype, p, pos))
        else:  # EXTRUDE
            close_loop(pos)
            in_loop = False
            if not loops:
                raise StructureError(f"record {pos}: extrusion with no preceding sketch")
            parts.append(_build_part(loops, p, pos))
            loops = []
    if in_loop or loops:
        raise StructureError("sketch commands with no closing extrusion")
    if not parts:
        raise StructureError("no parts")
    return CadSequence(parts=tuple(parts))


def _decode_curve(ctype: CommandType, p: np.ndarray, pos: int) -> tuple:
    def deq(slot: int, what: str) -> float:
        if p[slot] < 0:
            raise StructureError(f"record {pos}: missing {what}")
        return dequantize(int(p[slot]))

    if ctype == CommandType.LINE:
        return ("line", (deq(0, "end x"), deq(1, "end y")))
    if ctype == CommandType.ARC:
        return ("arc", (deq(0, "end x"), deq(1, "end y")), (deq(2, "mid x"), deq(3, "mid y")))
    radius = deq(4, "radius")
    if radius <= 0.0:
        raise StructureError(f"record {pos}: circle radius quantized to zero")
    return ("circle", (deq(0, "center x"), deq(1, "center y")), radius)


def _build_loop(specs: list[tuple], pos: int) -> Loop:
    if any(s[0] == "circle" for s in specs):
        if len(specs) != 1:
            raise StructureError(f"record {pos}: circle mixed into a curve chain")
        _, center, radius = specs[0]
        return Loop(curves=(Circle(center=center, radius=radius),))
    ends = [s[1] for s in specs]
    curves = []
    for i, spec in enumerate(specs):
        start = ends[i - 1]  # first curve starts at the last curve's end
        if spec[0] == "line":
            curves.append(Line(start=start, end=spec[1]))
        else:
            _, end, mid = spec
            if geom2d.is_degenerate_arc(start, mid, end):
                raise StructureError(
                    f"record {pos}: arc decodes to colinear or coincident points"
                )
            curves.append(Arc(start=start, mid=mid, end=end))
    return Loop(curves=tuple(curves))


def _build_part(loops: list[Loop], p: np.ndarray, pos: int) -> Part:
    faces = _group_loops_into_faces(loops)
    euler = tuple(_unit_to_angle(dequantize(int(p[s]))) for s in (SLOT_THETA, SLOT_PHI, SLOT_GAMMA))
    translation = tuple(dequantize(int(p[s])) for s in (SLOT_PX, SLOT_PY, SLOT_PZ))
    scale = dequantize(int(p[SLOT_SCALE]))
    if scale <= 0.0:
        raise StructureError(f"record {pos}: sketch_scale quantized to zero")
    d_plus = dequantize(int(p[SLOT_DPLUS]))
    d_minus = dequantize(int(p[SLOT_DMINUS]))
    if d_plus + d_minus <= 0.0:
        raise StructureError(f"record {pos}: both extrusion depths quantized to zero")
    bool_code = int(p[SLOT_BOOL])
    if not 0 <= bool_code <= 3:
        raise StructureError(f"record {pos}: unknown boolean operation {bool_code}")
    return Part(
        euler_angles=euler,
        translation=translation,
        sketch=Sketch(faces=faces),
        extrusion=Extrusion(
            depth_towards=d_plus,
            depth_opposite=d_minus,
            sketch_scale=scale,
            operation=Operation(bool_code),
        ),
    )


def _group_loops_into_faces(loops: list[Loop]) -> tuple[Face, ...]:
    """A loop inside the current face's outer boundary is one of its holes;
    anything else starts a new face."""
    faces: list[list[Loop]] = []
    outer_ring: np.ndarray | None = None
    for loop in loops:
        rep = _loop_representative(loop)
        if outer_ring is not None and geom2d.point_in_polygon(rep, outer_ring):
            faces[-1].append(loop)
        else:
            faces.append([loop])
            outer_ring = _loop_ring(loop)
    return tuple(Face(loops=tuple(group)) for group in faces)


def _loop_representative(loop: Loop):
    first = loop.curves[0]
    if isinstance(first, Circle):
        return first.center
    return first.start


def _loop_ring(loop: Loop, segments: int = 32) -> np.ndarray:
    pts: list = []
    for curve in loop.curves:
        if isinstance(curve, Circle):
            return geom2d.circle_polyline(curve.center, curve.radius, segments)
        if isinstance(curve, Line):
            pts.append(curve.start)
        else:
            pts.extend(geom2d.arc_polyline(curve.start, curve.mid, curve.end, segments)[:-1])
    return np.asarray(pts, dtype=float)


# ---------------------------------------------------------------------------
# human-readable trace


def trace_commands(seq: CadSequence) -> list[str]:
    """Verbose command trace with explicit end markers, for inspection only.

    The vector encoding keeps the six canonical command types; this trace
    additionally prints EndCurve/EndLoop/EndSketch/EndExtrude boundaries.
    """
    lines: list[str] = []
    for part in seq.parts:
        for face in part.sketch.faces:
            for loop in face.loops:
                lines.append("SOL")
                for curve in loop.curves:
                    if isinstance(curve, Line):
                        lines.append(f"Line(x={curve.end[0]}, y={curve.end[1]})")
                    elif isinstance(curve, Arc):
                        lines.append(
                            f"Arc(x={curve.end[0]}, y={curve.end[1]}, "
                            f"xm={curve.mid[0]}, ym={curve.mid[1]})"
                        )
                    else:
                        lines.append(
                            f"Circle(x={curve.center[0]}, y={curve.center[1]}, "
                            f"r={curve.radius})"
                        )
                    lines.append("EndCurve")
                lines.append("EndLoop")
        lines.append("EndSketch")
        ext = part.extrusion
        a1, a2, a3 = part.euler_angles
        px, py, pz = part.translation
        lines.append(
            f"Extrude(theta={a1}, phi={a2}, gamma={a3}, px={px}, py={py}, pz={pz}, "
            f"s={ext.sketch_scale}, d+={ext.depth_towards}, d-={ext.depth_opposite}, "
            f"b={ext.operation.value}, u=0)"
        )
        lines.append("EndExtrude")
    used = command_count(seq)
    lines.append(f"EOS (x {max(0, SEQUENCE_LENGTH - used)})")
    return lines
