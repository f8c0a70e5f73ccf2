import math

import numpy as np
import pytest

from cadkit import codec
from cadkit.codec import (
    CommandType,
    CommandVector,
    SEQUENCE_LENGTH,
    check_vector,
    decode_sequence,
    dequantize,
    encode_sequence,
    quantize,
    trace_commands,
)
from cadkit.errors import ClampWarning, QuantizeError, StructureError, TruncationError
from cadkit.model import Arc, Circle, Line, parse_cad_json
from seqgen import random_sequence

COORD_TOL = 1.0 / 510.0  # half a quantization bin


def test_quantize_bounds():
    assert quantize(0.0) == 0
    assert quantize(1.0) == 255
    assert quantize(0.375) == 96  # round(95.625)
    assert quantize(0.75) == 191
    assert quantize(0.1046) == 27


def test_quantize_clamps():
    assert quantize(-0.5) == 0
    assert quantize(1.7) == 255


def test_quantize_ties_round_half_up():
    # 127.5 is exactly halfway; half-up gives 128 on every platform
    assert quantize(0.5) == 128
    assert quantize(127.5 / 255.0) == 128


def test_quantize_nan_rejected():
    with pytest.raises(QuantizeError):
        quantize(float("nan"))


def test_dequantize_bounds():
    assert dequantize(0) == 0.0
    assert dequantize(255) == 1.0
    assert dequantize(96) == pytest.approx(0.3764705882, abs=1e-10)
    with pytest.raises(QuantizeError):
        dequantize(256)
    with pytest.raises(QuantizeError):
        dequantize(-1)


def test_quantize_roundtrip_error_bound():
    vs = np.linspace(0.0, 1.0, 2001)
    for v in vs:
        assert abs(dequantize(quantize(float(v))) - v) <= COORD_TOL + 1e-15


def test_quantize_monotone():
    vs = np.sort(np.random.default_rng(0).uniform(0, 1, 500))
    bins = [quantize(float(v)) for v in vs]
    assert all(b1 <= b2 for b1, b2 in zip(bins, bins[1:]))


def test_encode_cylinder_layout(cylinder_json):
    vec = encode_sequence(parse_cad_json(cylinder_json))
    assert [CommandType(t) for t in vec.types[:3]] == [
        CommandType.SOL,
        CommandType.CIRCLE,
        CommandType.EXTRUDE,
    ]
    assert (vec.types[3:] == CommandType.EOS).all()
    circle = vec.params[1]
    assert list(circle[:2]) == [96, 96]
    assert circle[4] == 96
    assert list(circle[[2, 3]]) == [-1, -1]
    ext = vec.params[2]
    assert ext[codec.SLOT_SCALE] == 191
    assert ext[codec.SLOT_DPLUS] == 27
    assert ext[codec.SLOT_DMINUS] == 0
    assert ext[codec.SLOT_BOOL] == 0
    assert ext[codec.SLOT_EXTENT] == 0
    # zero Euler angles sit mid-range: (0 + 180)/360 -> 0.5 -> 128
    assert list(ext[[codec.SLOT_THETA, codec.SLOT_PHI, codec.SLOT_GAMMA]]) == [128, 128, 128]


def test_encode_padding_invariant(cylinder_json):
    vec = encode_sequence(parse_cad_json(cylinder_json))
    first_eos = vec.command_count
    assert first_eos == 3
    assert (vec.types[first_eos:] == CommandType.EOS).all()
    assert (vec.params[first_eos:] == -1).all()
    check_vector(vec)


def test_encode_prism_trace(prism_json):
    vec = encode_sequence(parse_cad_json(prism_json))
    kinds = [CommandType(t) for t in vec.types[: vec.command_count]]
    assert kinds[0] == CommandType.SOL
    assert kinds[-1] == CommandType.EXTRUDE
    assert kinds.count(CommandType.LINE) == 9
    assert kinds.count(CommandType.ARC) == 1


def test_truncation_error():
    rng = np.random.default_rng(3)
    seq = random_sequence(rng, max_parts=1)
    parts = seq.parts * 12  # way over 60 commands
    from cadkit.model import CadSequence

    big = CadSequence(parts=tuple(parts))
    with pytest.raises(TruncationError) as exc:
        encode_sequence(big)
    assert exc.value.count > SEQUENCE_LENGTH
    truncated = encode_sequence(big, allow_truncation=True)
    assert truncated.types.shape == (SEQUENCE_LENGTH,)


def test_out_of_range_coordinate_warns(cylinder_json):
    import json

    doc = json.loads(cylinder_json)
    doc["parts"]["part_1"]["coordinate_system"]["Translation Vector"] = [1.5, 0.0, 0.0]
    seq = parse_cad_json(json.dumps(doc))
    with pytest.warns(ClampWarning):
        vec = encode_sequence(seq)
    assert vec.params[2][codec.SLOT_PX] == 255


def assert_struct_close(a, b, tol=COORD_TOL):
    assert len(a.parts) == len(b.parts)
    for pa, pb in zip(a.parts, b.parts):
        assert len(pa.sketch.faces) == len(pb.sketch.faces)
        for fa, fb in zip(pa.sketch.faces, pb.sketch.faces):
            assert len(fa.loops) == len(fb.loops)
            for la, lb in zip(fa.loops, fb.loops):
                assert len(la.curves) == len(lb.curves)
                for ca, cb in zip(la.curves, lb.curves):
                    assert type(ca) is type(cb)
                    if isinstance(ca, Line):
                        pairs = [(ca.end, cb.end)]
                    elif isinstance(ca, Arc):
                        pairs = [(ca.end, cb.end), (ca.mid, cb.mid)]
                    else:
                        pairs = [(ca.center, cb.center)]
                        assert abs(ca.radius - cb.radius) <= tol
                    for va, vb in pairs:
                        assert abs(va[0] - vb[0]) <= tol
                        assert abs(va[1] - vb[1]) <= tol
        # angles quantize on the (deg + 180) / 360 scale
        for aa, ab in zip(pa.euler_angles, pb.euler_angles):
            assert abs(aa - ab) / 360.0 <= tol + 1e-12
        for ta, tb in zip(pa.translation, pb.translation):
            assert abs(ta - tb) <= tol
        assert abs(pa.extrusion.depth_towards - pb.extrusion.depth_towards) <= tol
        assert abs(pa.extrusion.depth_opposite - pb.extrusion.depth_opposite) <= tol
        assert abs(pa.extrusion.sketch_scale - pb.extrusion.sketch_scale) <= tol
        assert pa.extrusion.operation == pb.extrusion.operation


def test_roundtrip_cylinder(cylinder_json):
    seq = parse_cad_json(cylinder_json)
    back = decode_sequence(encode_sequence(seq))
    assert_struct_close(seq, back)
    radius = back.parts[0].sketch.faces[0].loops[0].curves[0].radius
    assert abs(radius - 0.375) <= COORD_TOL


def test_roundtrip_prism(prism_json):
    seq = parse_cad_json(prism_json)
    back = decode_sequence(encode_sequence(seq))
    assert_struct_close(seq, back)
    curves = back.parts[0].sketch.faces[0].loops[0].curves
    assert sum(isinstance(c, Line) for c in curves) == 9
    assert sum(isinstance(c, Arc) for c in curves) == 1


def test_roundtrip_random_models():
    rng = np.random.default_rng(11)
    for _ in range(100):
        seq = random_sequence(rng)
        back = decode_sequence(encode_sequence(seq))
        assert_struct_close(seq, back)


def test_decode_all_eos_rejected():
    vec = CommandVector(
        types=np.full(SEQUENCE_LENGTH, CommandType.EOS, dtype=np.uint8),
        params=np.full((SEQUENCE_LENGTH, 16), -1, dtype=np.int16),
    )
    with pytest.raises(StructureError, match="no parts"):
        decode_sequence(vec)


def test_decode_ignores_entries_after_eos(cylinder_json):
    vec = encode_sequence(parse_cad_json(cylinder_json))
    types = vec.types.copy()
    params = vec.params.copy()
    types[10] = CommandType.LINE  # junk after the first EOS
    params[10, 0] = 5
    params[10, 1] = 5
    patched = CommandVector(types=types, params=params)
    back = decode_sequence(patched)
    assert len(back.parts) == 1


def test_decode_extrude_without_sketch_rejected():
    types = np.full(SEQUENCE_LENGTH, CommandType.EOS, dtype=np.uint8)
    params = np.full((SEQUENCE_LENGTH, 16), -1, dtype=np.int16)
    types[0] = CommandType.EXTRUDE
    params[0, 5:16] = [128, 128, 128, 0, 0, 0, 255, 100, 0, 0, 0]
    with pytest.raises(StructureError, match="no preceding sketch"):
        decode_sequence(CommandVector(types=types, params=params))


def test_decode_sol_without_curves_rejected(cylinder_json):
    vec = encode_sequence(parse_cad_json(cylinder_json))
    types = vec.types.copy()
    params = vec.params.copy()
    # insert an empty loop: SOL directly followed by another SOL
    types[1:4] = [CommandType.SOL, CommandType.CIRCLE, CommandType.EXTRUDE]
    params[1:4] = np.vstack([np.full(16, -1), vec.params[1], vec.params[2]])
    with pytest.raises(StructureError, match="no curves"):
        decode_sequence(CommandVector(types=types, params=params))


def test_decode_colinear_arc_rejected():
    types = np.full(SEQUENCE_LENGTH, CommandType.EOS, dtype=np.uint8)
    params = np.full((SEQUENCE_LENGTH, 16), -1, dtype=np.int16)
    types[0] = CommandType.SOL
    types[1] = CommandType.LINE
    params[1, :2] = [100, 0]
    types[2] = CommandType.ARC  # start (100,0)/255, end (0,0), mid halfway: colinear
    params[2, :4] = [0, 0, 50, 0]
    types[3] = CommandType.EXTRUDE
    params[3, 5:16] = [128, 128, 128, 0, 0, 0, 255, 100, 0, 0, 0]
    with pytest.raises(StructureError, match="colinear"):
        decode_sequence(CommandVector(types=types, params=params))


def test_binary_roundtrip(prism_json):
    vec = encode_sequence(parse_cad_json(prism_json))
    blob = vec.to_bytes()
    assert blob[:4] == b"CSQ1"
    assert len(blob) == 6 + SEQUENCE_LENGTH * (1 + 32)
    back = CommandVector.from_bytes(blob)
    assert (back.types == vec.types).all()
    assert (back.params == vec.params).all()


def test_binary_rejects_corruption(cylinder_json):
    blob = bytearray(encode_sequence(parse_cad_json(cylinder_json)).to_bytes())
    with pytest.raises(StructureError):
        CommandVector.from_bytes(bytes(blob[:-10]))
    blob[0] = ord("X")
    with pytest.raises(StructureError, match="magic"):
        CommandVector.from_bytes(bytes(blob))


def test_one_hot_shape_and_classes(cylinder_json):
    vec = encode_sequence(parse_cad_json(cylinder_json))
    hot = vec.to_one_hot()
    assert hot.shape == (SEQUENCE_LENGTH, 6 + 16 * 257)
    assert (hot[:, :6].sum(axis=1) == 1).all()
    # every parameter group is one-hot too
    groups = hot[:, 6:].reshape(SEQUENCE_LENGTH, 16, 257)
    assert (groups.sum(axis=2) == 1).all()
    # EOS rows point every parameter at the "unused" class
    assert (groups[-1, :, 256] == 1).all()


def test_trace_has_extended_markers(cylinder_json):
    lines = trace_commands(parse_cad_json(cylinder_json))
    assert lines[0] == "SOL"
    assert "EndCurve" in lines
    assert "EndLoop" in lines
    assert "EndSketch" in lines
    assert "EndExtrude" in lines
    assert lines[-1] == "EOS (x 57)"
