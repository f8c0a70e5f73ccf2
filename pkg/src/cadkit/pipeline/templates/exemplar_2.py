import cadquery as cq

# --- Part 1: Rectangular prism with a curved top and a cutout on one side ---
part_1 = (
    cq.Workplane("XY")
    .moveTo(0.0, 0.0)
    .lineTo(0.5625, 0.0)
    .lineTo(0.5625, 0.046875)
    .lineTo(0.421875, 0.046875)
    .lineTo(0.421875, 0.339825)
    .lineTo(0.398475, 0.339825)
    .threePointArc((0.28125, 0.222675), (0.1641, 0.339825))
    .lineTo(0.140625, 0.339825)
    .lineTo(0.140625, 0.046875)
    .lineTo(0.0, 0.046875)
    .lineTo(0.0, 0.0)
    .close()
    .extrude(0.5625)
)
# --- Coordinate System Transformation for Part 1 ---
part_1 = part_1.rotate((0, 0, 0), (0, 0, 1), -90)
part_1 = part_1.translate((0, 0.5625, 0))

# --- Final Result ---
result = part_1
cq.exporters.export(result, 'result.stl')
