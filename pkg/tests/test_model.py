import json
import math

import numpy as np
import pytest

from cadkit.errors import GeometryError, SchemaError, UnknownKeyWarning
from cadkit.model import (
    Arc,
    CadSequence,
    Circle,
    Line,
    Operation,
    command_count,
    parse_cad_json,
    serialize_cad_json,
)
from seqgen import random_sequence


def test_parse_cylinder(cylinder_json):
    seq = parse_cad_json(cylinder_json)
    assert len(seq.parts) == 1
    part = seq.parts[0]
    assert len(part.sketch.faces) == 1
    assert len(part.sketch.faces[0].loops) == 1
    (curve,) = part.sketch.faces[0].loops[0].curves
    assert isinstance(curve, Circle)
    assert curve.center == (0.375, 0.375)
    assert curve.radius == 0.375
    ext = part.extrusion
    assert ext.depth_towards == 0.1046
    assert ext.depth_opposite == 0.0
    assert ext.sketch_scale == 0.75
    assert ext.operation is Operation.NEW_BODY


def test_parse_prism(prism_json):
    seq = parse_cad_json(prism_json)
    part = seq.parts[0]
    assert part.euler_angles == (0.0, 0.0, -90.0)
    assert part.translation == (0.0, 0.5625, 0.0)
    curves = part.sketch.faces[0].loops[0].curves
    assert len(curves) == 10
    assert sum(isinstance(c, Line) for c in curves) == 9
    assert sum(isinstance(c, Arc) for c in curves) == 1
    # the arc sits sixth in modeling order, between line_5 and line_6
    assert isinstance(curves[5], Arc)
    assert curves[5].mid == (0.375, 0.2969)


def test_empty_parts_rejected():
    with pytest.raises(SchemaError) as exc:
        parse_cad_json('{"parts": {}}')
    assert exc.value.path == "parts"
    assert exc.value.reason == "empty"


def test_malformed_json_raises_syntax_error():
    with pytest.raises(json.JSONDecodeError):
        parse_cad_json("{not json")


def test_missing_field_reports_path(cylinder_json):
    doc = json.loads(cylinder_json)
    del doc["parts"]["part_1"]["extrusion"]
    with pytest.raises(SchemaError) as exc:
        parse_cad_json(json.dumps(doc))
    assert "extrusion" in exc.value.path


def test_non_dense_part_keys_rejected(cylinder_json):
    doc = json.loads(cylinder_json)
    doc["parts"]["part_3"] = doc["parts"]["part_1"]
    with pytest.raises(SchemaError):
        parse_cad_json(json.dumps(doc))


def test_unknown_key_warns(cylinder_json):
    doc = json.loads(cylinder_json)
    doc["parts"]["part_1"]["fillet"] = {}
    with pytest.warns(UnknownKeyWarning):
        seq = parse_cad_json(json.dumps(doc))
    assert len(seq.parts) == 1


def test_zero_radius_rejected(cylinder_json):
    doc = json.loads(cylinder_json)
    doc["parts"]["part_1"]["sketch"]["face_1"]["loop_1"]["circle_1"]["Radius"] = 0.0
    with pytest.raises(GeometryError):
        parse_cad_json(json.dumps(doc))


def test_open_loop_rejected(prism_json):
    doc = json.loads(prism_json)
    loop = doc["parts"]["part_1"]["sketch"]["face_1"]["loop_1"]
    loop["line_9"]["End Point"] = [0.0, 0.2]  # no longer meets line_1's start
    with pytest.raises(GeometryError) as exc:
        parse_cad_json(json.dumps(doc))
    assert "closed" in str(exc.value) or "connected" in str(exc.value)


def test_nonfinite_values_rejected(cylinder_json):
    doc = json.loads(cylinder_json)
    doc["parts"]["part_1"]["coordinate_system"]["Euler Angles"] = [0.0, float("nan"), 0.0]
    with pytest.raises(SchemaError):
        parse_cad_json(json.dumps(doc, allow_nan=True))


def test_zero_depth_both_sides_rejected(cylinder_json):
    doc = json.loads(cylinder_json)
    ext = doc["parts"]["part_1"]["extrusion"]
    ext["extrude_depth_towards_normal"] = 0.0
    ext["extrude_depth_opposite_normal"] = 0.0
    with pytest.raises(GeometryError):
        parse_cad_json(json.dumps(doc))


def test_circle_mixed_into_chain_rejected(cylinder_json):
    doc = json.loads(cylinder_json)
    loop = doc["parts"]["part_1"]["sketch"]["face_1"]["loop_1"]
    loop["line_1"] = {"Start Point": [0.0, 0.0], "End Point": [0.0, 0.0]}
    with pytest.raises(GeometryError):
        parse_cad_json(json.dumps(doc))


def test_roundtrip_cylinder(cylinder_json):
    seq = parse_cad_json(cylinder_json)
    again = parse_cad_json(serialize_cad_json(seq))
    assert again == seq


def test_roundtrip_prism_preserves_all_curves(prism_json):
    seq = parse_cad_json(prism_json)
    text = serialize_cad_json(seq)
    assert '"line_9"' in text
    again = parse_cad_json(text)
    assert again == seq
    assert len(again.parts[0].sketch.faces[0].loops[0].curves) == 10


def test_serialize_orders_parts_and_keys(cylinder_json):
    seq = parse_cad_json(cylinder_json)
    two = CadSequence(parts=(seq.parts[0], seq.parts[0]), final_name="pair")
    text = serialize_cad_json(two)
    doc = json.loads(text)
    assert list(doc["parts"].keys()) == ["part_1", "part_2"]
    part_keys = list(doc["parts"]["part_1"].keys())
    assert part_keys == ["coordinate_system", "sketch", "extrusion", "description"]


def test_roundtrip_random_models():
    rng = np.random.default_rng(7)
    for _ in range(50):
        seq = random_sequence(rng)
        assert parse_cad_json(serialize_cad_json(seq)) == seq


def test_command_count_cylinder(cylinder_json):
    # SOL + Circle + Extrude
    assert command_count(parse_cad_json(cylinder_json)) == 3


def test_command_count_prism(prism_json):
    # SOL + 10 curves + Extrude
    assert command_count(parse_cad_json(prism_json)) == 12
