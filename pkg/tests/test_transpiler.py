from pathlib import Path

import numpy as np
import pytest

from cadkit.model import CadSequence, Operation, parse_cad_json
from cadkit.transpiler import static_check, transpile
from seqgen import random_sequence
from shapes import box_part, cube_with_pocket_sequence, washer_sequence

GOLDEN = Path(__file__).parent / "golden"

# same failure shape as the known small-scale arc crash: the arc's three
# points are exactly colinear once the chain is resolved
DEGENERATE_ARC_SCRIPT = """\
import cadquery as cq

sketch_scale = 0.75
extrude_depth = 0.0521 * sketch_scale

part_1 = (
    cq.Workplane("XY")
    .moveTo(0.0, 0.0)
    .lineTo(0.0208 * sketch_scale, 0.0)
    .threePointArc((0.0104 * sketch_scale, 0.0104 * sketch_scale),
                   (0.0, 0.0208 * sketch_scale))
    .lineTo(0.0, 0.0)
    .close()
    .extrude(extrude_depth)
)

result = part_1
"""


def test_cylinder_compat_golden(cylinder_json):
    emission = transpile(parse_cad_json(cylinder_json), compat=True)
    assert emission.source == (GOLDEN / "cylinder_compat.py").read_text()
    assert emission.part_count == 1
    assert emission.uses_compat_mode
    assert "0.28125" in emission.source  # radius, pre-scaled
    assert "0.1046" in emission.source  # height
    assert ".circle(0.28125)" in emission.source
    assert ".extrude(0.1046)" in emission.source


def test_prism_compat_golden(prism_json):
    emission = transpile(parse_cad_json(prism_json), compat=True)
    assert emission.source == (GOLDEN / "prism_compat.py").read_text()
    src = emission.source
    assert src.count(".lineTo(") == 9
    assert ".threePointArc((0.28125, 0.222675), (0.1641, 0.339825))" in src
    assert ".rotate((0, 0, 0), (0, 0, 1), -90)" in src
    assert ".translate((0, 0.5625, 0))" in src


def test_source_shape_contract(cylinder_json):
    emission = transpile(parse_cad_json(cylinder_json), stl_path="out/shape.stl")
    lines = emission.source.strip().splitlines()
    assert lines[0].startswith("import ")
    assert lines[-1] == "cq.exporters.export(result, 'out/shape.stl')"


def test_faithful_mode_keeps_circle_center(cylinder_json):
    emission = transpile(parse_cad_json(cylinder_json), compat=False)
    assert ".pushPoints([(0.28125, 0.28125)])" in emission.source


def test_determinism(prism_json):
    seq = parse_cad_json(prism_json)
    a = transpile(seq, compat=False, stl_path="x.stl")
    b = transpile(seq, compat=False, stl_path="x.stl")
    assert a.source == b.source


def test_all_operations_emitted():
    seq = CadSequence(
        parts=(
            box_part(0.0, 0.0, 1.0, 1.0, 1.0),
            box_part(0.2, 0.2, 0.8, 0.8, 1.0, operation=Operation.JOIN),
            box_part(0.4, 0.4, 0.6, 0.6, 1.0, operation=Operation.CUT),
            box_part(0.0, 0.0, 0.5, 0.5, 1.0, operation=Operation.INTERSECT),
        )
    )
    src = transpile(seq).source
    assert "result = result.union(part_2)" in src
    assert "result = result.cut(part_3)" in src
    assert "result = result.intersect(part_4)" in src


def test_two_sided_extrusion_unioned():
    seq = CadSequence(parts=(box_part(0.0, 0.0, 1.0, 1.0, 0.3, depth_opposite=0.2),))
    src = transpile(seq).source
    assert ".extrude(0.3)" in src
    assert ".extrude(-0.2)" in src
    assert "part_1 = part_1.union(part_1_back)" in src


def test_hole_emitted_as_cut():
    src = transpile(washer_sequence()).source
    assert "part_1_hole_1" in src
    assert "part_1 = part_1.cut(part_1_hole_1)" in src


def test_emitted_scripts_always_lint_clean():
    rng = np.random.default_rng(21)
    for _ in range(25):
        seq = random_sequence(rng)
        for compat in (False, True):
            emission = transpile(seq, compat=compat)
            assert static_check(emission.source) == []


def test_static_check_degenerate_arc_script():
    findings = static_check(DEGENERATE_ARC_SCRIPT)
    codes = {f.code for f in findings}
    assert "degenerate-arc" in codes
    assert "no-export" in codes  # script never exports an STL


def test_static_check_clean_arc_passes(prism_json):
    src = transpile(parse_cad_json(prism_json)).source
    assert all(f.code != "degenerate-arc" for f in static_check(src))


def test_static_check_missing_import():
    findings = static_check("x = 1\n")
    assert any(f.code == "missing-import" for f in findings)


def test_static_check_no_workplane():
    src = "import cadquery as cq\npart = something.lineTo(1, 0).close().extrude(1)\n"
    findings = static_check(src)
    assert any(f.code == "no-workplane" for f in findings)


def test_static_check_missing_close():
    src = (
        "import cadquery as cq\n"
        'part = cq.Workplane("XY").moveTo(0, 0).lineTo(1, 0).lineTo(1, 1).extrude(1)\n'
        "cq.exporters.export(part, 'a.stl')\n"
    )
    findings = static_check(src)
    assert any(f.code == "missing-close" for f in findings)


def test_static_check_circle_needs_no_close():
    src = (
        "import cadquery as cq\n"
        'part = cq.Workplane("XY").circle(1.0).extrude(1)\n'
        "cq.exporters.export(part, 'a.stl')\n"
    )
    assert static_check(src) == []


def test_static_check_coincident_arc_points():
    src = (
        "import cadquery as cq\n"
        'p = cq.Workplane("XY").moveTo(0, 0).lineTo(1, 0)'
        ".threePointArc((1.0, 0.0), (0.0, 1.0)).close().extrude(1)\n"
        "cq.exporters.export(p, 'a.stl')\n"
    )
    findings = static_check(src)
    assert any(f.code == "degenerate-arc" for f in findings)


def test_static_check_unparseable_source():
    findings = static_check("def broken(:\n")
    assert findings[0].code == "syntax-error"
