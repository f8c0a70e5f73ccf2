"""Human-review interchange: export pending bundles, import verdicts.

The tool never simulates the reviewer. Samples that executed get exported
as self-contained bundles (model JSON + generated code + rendered
silhouettes); a reviewer returns one verdicts JSON, which is folded back
into the checkpoints.
"""

from __future__ import annotations

import base64
import json
from pathlib import Path
from typing import Optional

from ..metrics.stl import load_stl
from .annotate import (
    STATUS_ACCEPTED,
    STATUS_SHAPE_MISMATCH,
    checkpoint_path,
)
from .render import image_to_png, render_silhouette


def export_review_bundles(
    samples: dict[str, str],
    checkpoint_dir,
    bundle_dir,
    ground_truths: Optional[dict[str, bytes]] = None,
) -> list[str]:
    """Write one review bundle per executed sample; returns exported ids.

    Bundle layout: <id>/model.json, <id>/code.py, <id>/predicted.png and,
    when a ground-truth STL is known, <id>/ground_truth.png plus a small
    status.json carrying the machine judge's verdict.
    """
    checkpoint_dir = Path(checkpoint_dir)
    bundle_dir = Path(bundle_dir)
    exported: list[str] = []
    for sample_id in sorted(samples):
        path = checkpoint_path(checkpoint_dir, sample_id)
        if not path.exists():
            continue
        doc = json.loads(path.read_text())
        if doc["status"] not in (STATUS_ACCEPTED, STATUS_SHAPE_MISMATCH):
            continue
        last = doc["attempts"][-1]
        stl_b64 = last["execution"].get("stl_b64")
        if not stl_b64:
            continue
        target = bundle_dir / sample_id
        target.mkdir(parents=True, exist_ok=True)
        (target / "model.json").write_text(samples[sample_id])
        (target / "code.py").write_text(last["llm_output"])
        stl = base64.b64decode(stl_b64)
        (target / "predicted.png").write_bytes(image_to_png(render_silhouette(load_stl(stl))))
        gt = (ground_truths or {}).get(sample_id)
        if gt is not None:
            (target / "ground_truth.png").write_bytes(
                image_to_png(render_silhouette(load_stl(gt)))
            )
        (target / "status.json").write_text(
            json.dumps({"status": doc["status"], "judge": last.get("judge")}, indent=2)
        )
        exported.append(sample_id)
    return exported


def import_review_verdicts(checkpoint_dir, verdicts_path) -> dict[str, str]:
    """Fold reviewer verdicts back into the checkpoints.

    The verdicts file maps sample id to {"match": bool, "explanation": str}.
    A rejecting verdict demotes the checkpoint to shape_mismatch; an
    accepting one promotes it to accepted. Returns {id: new_status}.
    """
    checkpoint_dir = Path(checkpoint_dir)
    verdicts = json.loads(Path(verdicts_path).read_text())
    changed: dict[str, str] = {}
    for sample_id, verdict in sorted(verdicts.items()):
        path = checkpoint_path(checkpoint_dir, sample_id)
        if not path.exists():
            continue
        doc = json.loads(path.read_text())
        new_status = STATUS_ACCEPTED if verdict.get("match") else STATUS_SHAPE_MISMATCH
        doc["status"] = new_status
        doc["human_review"] = {
            "match": bool(verdict.get("match")),
            "explanation": verdict.get("explanation", ""),
        }
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(doc, indent=2))
        tmp.replace(path)
        changed[sample_id] = new_status
    return changed
