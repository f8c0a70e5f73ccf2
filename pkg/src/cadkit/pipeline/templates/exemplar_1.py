import cadquery as cq

# --- Part 1: Cylinder ---
part_1 = (
    cq.Workplane("XY")
    .circle(0.28125)
    .extrude(0.1046)
)

# --- Final Result ---
result = part_1
cq.exporters.export(result, 'result.stl')
