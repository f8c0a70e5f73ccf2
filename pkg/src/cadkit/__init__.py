"""Sketch-extrude CAD toolkit.

Parses the minimal-JSON sketch-extrude representation, encodes it to
fixed-length quantized command vectors, builds the described solids
in-process, transpiles models to CadQuery scripts, scores predicted vs.
ground-truth shapes (Chamfer Distance, F1, volumetric IoU, Invalid Rate),
and orchestrates an execute-and-self-correct annotation pipeline.
"""

__version__ = "0.1.0"
